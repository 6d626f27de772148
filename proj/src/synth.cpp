// Copyright 2026 The apexfas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "apexfas/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>

#include "apexfas/apex.hpp"
#include "apexfas/error.hpp"
#include "apexfas/metrics.hpp"
#include "apexfas/model.hpp"

namespace apexfas {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  // splitmix64 finalizer over the combined key
  std::uint64_t z = seed ^ (a * 0x9E3779B97F4A7C15ULL) ^ (b * 0xC2B2AE3D27D4EB4FULL) ^ (c * 0x165667B19E3779F9ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view v) {
  const std::string s(trim(v));
  char* end = nullptr;
  const double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(out)) {
    throw UsageError("synth config: '" + std::string(key) + "' expects a number, got '" + s + "'");
  }
  return out;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view v) {
  const auto s = trim(v);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError("synth config: '" + std::string(key) + "' expects an unsigned integer, got '" + std::string(s) +
                     "'");
  }
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? s.size() - start : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

void SynthConfig::validate() const {
  if (videos_per_class == 0) throw UsageError("synth: videos_per_class must be >= 1");
  if (frames == 0) throw UsageError("synth: frames must be >= 1");
  if (height < 2 || width < 2) throw UsageError("synth: frame size must be at least 2x2");
  if (domains.empty()) throw UsageError("synth: at least one domain is required");
  for (const auto& d : domains) {
    if (d.name.empty() || d.name.find_first_of(",/\\ ") != std::string::npos) {
      throw UsageError("synth: domain names must be non-empty without commas, slashes or spaces");
    }
    if (!(d.texture_period > 0.0) || d.noise_scale < 0.0) {
      throw UsageError("synth: domain '" + d.name + "' needs texture_period > 0 and noise_scale >= 0");
    }
  }
  if (!(blob_radius > 0.0)) throw UsageError("synth: blob_radius must be > 0");
}

void apply_synth_setting(SynthConfig& c, std::string_view key, std::string_view value) {
  if (key == "videos_per_class") {
    c.videos_per_class = parse_unsigned(key, value);
  } else if (key == "frames") {
    c.frames = parse_unsigned(key, value);
  } else if (key == "height") {
    c.height = parse_unsigned(key, value);
  } else if (key == "width") {
    c.width = parse_unsigned(key, value);
  } else if (key == "blob_intensity") {
    c.blob_intensity = parse_double(key, value);
  } else if (key == "blob_radius") {
    c.blob_radius = parse_double(key, value);
  } else if (key == "motion_amplitude") {
    c.motion_amplitude = parse_double(key, value);
  } else if (key == "texture_amplitude") {
    c.texture_amplitude = parse_double(key, value);
  } else if (key == "flicker_amplitude") {
    c.flicker_amplitude = parse_double(key, value);
  } else if (key == "temporal_drift") {
    c.temporal_drift = parse_double(key, value);
  } else if (key == "seed") {
    c.seed = parse_unsigned(key, value);
  } else if (key == "domains") {
    c.domains.clear();
    for (auto item : split(trim(value), ';')) {
      const auto parts = split(trim(item), ':');
      if (parts.size() != 4) {
        throw UsageError("synth config: domain '" + std::string(item) + "' must be name:background:noise:period");
      }
      c.domains.push_back({std::string(trim(parts[0])), parse_double(key, parts[1]), parse_double(key, parts[2]),
                           parse_double(key, parts[3])});
    }
  } else {
    throw UsageError("synth config: unknown key '" + std::string(key) + "'");
  }
}

SynthConfig parse_synth_config(std::istream& in) {
  SynthConfig c;
  std::string line;
  while (std::getline(in, line)) {
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("synth config: expected key=value, got '" + std::string(body) + "'");
    }
    apply_synth_setting(c, trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
  }
  c.validate();
  return c;
}

void write_synth_config(const SynthConfig& c, std::ostream& out) {
  out << "videos_per_class=" << c.videos_per_class << '\n'
      << "frames=" << c.frames << '\n'
      << "height=" << c.height << '\n'
      << "width=" << c.width << '\n'
      << "domains=";
  for (std::size_t k = 0; k < c.domains.size(); ++k) {
    const auto& d = c.domains[k];
    out << (k ? ";" : "") << d.name << ':' << d.background << ':' << d.noise_scale << ':' << d.texture_period;
  }
  out << '\n'
      << "blob_intensity=" << c.blob_intensity << '\n'
      << "blob_radius=" << c.blob_radius << '\n'
      << "motion_amplitude=" << c.motion_amplitude << '\n'
      << "texture_amplitude=" << c.texture_amplitude << '\n'
      << "flicker_amplitude=" << c.flicker_amplitude << '\n'
      << "temporal_drift=" << c.temporal_drift << '\n'
      << "seed=" << c.seed << '\n';
}

VideoTensor synthesize_video(const SynthConfig& c, std::size_t domain, Label label, std::size_t index) {
  if (domain >= c.domains.size()) {
    throw UsageError("synth: domain index out of range");
  }
  if (label == Label::Unlabeled) {
    throw UsageError("synth: videos are generated for live or spoof only");
  }
  const auto& dom = c.domains[domain];
  const bool live = label == Label::Live;
  std::mt19937_64 rng(mix_seed(c.seed, domain, live ? 1 : 2, index));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;

  const double h = static_cast<double>(c.height);
  const double w = static_cast<double>(c.width);
  const double cx0 = 0.5 * (w - 1.0) + (unit(rng) - 0.5) * 0.2 * w;
  const double cy0 = 0.5 * (h - 1.0) + (unit(rng) - 0.5) * 0.2 * h;
  const double phase_x = unit(rng) * kTwoPi;
  const double phase_y = unit(rng) * kTwoPi;
  const double period = static_cast<double>(c.frames) * (0.8 + 0.4 * unit(rng));
  const double intensity = c.blob_intensity * (0.85 + 0.3 * unit(rng));
  const double two_r2 = 2.0 * c.blob_radius * c.blob_radius;

  // Printed/replayed media texture is fixed to the sensor grid.
  std::vector<double> texture(c.height * c.width, 0.0);
  if (!live) {
    for (std::size_t r = 0; r < c.height; ++r) {
      for (std::size_t col = 0; col < c.width; ++col) {
        texture[r * c.width + col] =
            0.5 * c.texture_amplitude *
            (std::cos(kTwoPi * static_cast<double>(col) / dom.texture_period) +
             std::cos(kTwoPi * static_cast<double>(r) / dom.texture_period));
      }
    }
  }

  std::vector<Frame> frames;
  frames.reserve(c.frames);
  const double n = static_cast<double>(c.frames);
  for (std::size_t t = 0; t < c.frames; ++t) {
    const double tt = static_cast<double>(t);
    const double cx = cx0 + c.motion_amplitude * std::sin(kTwoPi * tt / period + phase_x);
    const double cy = cy0 + c.motion_amplitude * std::cos(kTwoPi * tt / period + phase_y);
    const double ramp = c.frames > 1 ? 2.0 * tt / (n - 1.0) - 1.0 : 0.0;
    double offset = dom.background + c.temporal_drift * ramp * (live ? 1.0 : -1.0);
    if (!live) {
      offset += c.flicker_amplitude * (2.0 * unit(rng) - 1.0);
    }
    std::vector<float> px(c.height * c.width);
    for (std::size_t r = 0; r < c.height; ++r) {
      const double dy = static_cast<double>(r) - cy;
      for (std::size_t col = 0; col < c.width; ++col) {
        const double dx = static_cast<double>(col) - cx;
        double v = offset + intensity * std::exp(-(dx * dx + dy * dy) / two_r2) + texture[r * c.width + col] +
                   dom.noise_scale * gauss(rng);
        px[r * c.width + col] = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
    frames.emplace_back(c.height, c.width, 1, std::move(px));
  }
  char id[128];
  std::snprintf(id, sizeof id, "%s_%s_%03zu", dom.name.c_str(), live ? "live" : "spoof", index);
  return VideoTensor(id, std::move(frames));
}

DatasetManifest generate_dataset(const SynthConfig& c, const std::filesystem::path& out_dir) {
  c.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw DataError("cannot create output directory " + out_dir.string() + ": " + ec.message());
  }
  const std::size_t n = c.videos_per_class;
  const auto n_train = static_cast<std::size_t>(std::llround(0.6 * static_cast<double>(n)));
  const auto n_val = std::min(n - n_train, static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(n))));

  DatasetManifest written;  // paths relative to out_dir
  DatasetManifest result;
  for (std::size_t d = 0; d < c.domains.size(); ++d) {
    for (Label label : {Label::Live, Label::Spoof}) {
      std::vector<std::size_t> order(n);
      for (std::size_t k = 0; k < n; ++k) order[k] = k;
      std::mt19937_64 split_rng(mix_seed(c.seed, d, label == Label::Live ? 11 : 12, 0));
      std::shuffle(order.begin(), order.end(), split_rng);
      std::vector<Split> split_of(n);
      for (std::size_t pos = 0; pos < n; ++pos) {
        split_of[order[pos]] = pos < n_train ? Split::Train : (pos < n_train + n_val ? Split::Val : Split::Test);
      }
      for (std::size_t k = 0; k < n; ++k) {
        const auto video = synthesize_video(c, d, label, k);
        const std::string name = video.id() + ".afv";
        write_video(video, out_dir / name);
        written.entries.push_back({name, label, split_of[k], c.domains[d].name});
        result.entries.push_back({out_dir / name, label, split_of[k], c.domains[d].name});
      }
    }
  }
  write_manifest(written, out_dir / "manifest.csv");
  return result;
}

double high_frequency_energy(const Frame& frame) {
  const std::size_t grid = std::min<std::size_t>({kDefaultGrid, frame.height(), frame.width()});
  const auto f = extract_features(frame, grid);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r < grid; ++r) {
    for (std::size_t col = 0; col < grid; ++col) {
      const double v = f.values[r * grid + col];
      if (col + 1 < grid) {
        const double d = v - f.values[r * grid + col + 1];
        sum += d * d;
        ++count;
      }
      if (r + 1 < grid) {
        const double d = v - f.values[(r + 1) * grid + col];
        sum += d * d;
        ++count;
      }
    }
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

double class_separability_check(const DatasetManifest& manifest, double sigma) {
  ScoreSet scores;
  for (const auto& e : manifest.entries) {
    if (e.label == Label::Unlabeled) continue;
    const auto apex = apex_frame(read_video(e.video_path), sigma);
    scores.add(1.0 / (1.0 + high_frequency_energy(apex.frame)), e.label == Label::Live);
  }
  return auc(scores);
}

}  // namespace apexfas
