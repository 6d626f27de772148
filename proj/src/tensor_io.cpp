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

#include "apexfas/tensor_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "apexfas/error.hpp"
#include "binary_io.hpp"

namespace apexfas {

namespace detail {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw DataError("cannot open file for writing: " + path);
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw DataError("write failed: " + path);
  }
}

}  // namespace detail

namespace {

constexpr char kVideoMagic[4] = {'A', 'F', 'V', '1'};
constexpr std::size_t kVideoHeaderBytes = 20;

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

}  // namespace

Frame::Frame(std::size_t height, std::size_t width, std::size_t channels)
    : Frame(height, width, channels, std::vector<float>(height * width * channels, 0.0f)) {}

Frame::Frame(std::size_t height, std::size_t width, std::size_t channels, std::vector<float> pixels)
    : height_(height), width_(width), channels_(channels), pixels_(std::move(pixels)) {
  if (height == 0 || width == 0) {
    throw UsageError("frame dimensions must be positive");
  }
  if (channels != 1 && channels != 3) {
    throw UsageError("frame channels must be 1 or 3, got " + std::to_string(channels));
  }
  if (pixels_.size() != height * width * channels) {
    throw UsageError("pixel count does not match frame shape");
  }
  for (float v : pixels_) {
    if (!std::isfinite(v)) {
      throw NumericError("frame contains a non-finite pixel");
    }
  }
}

bool Frame::in_unit_range() const noexcept {
  return std::all_of(pixels_.begin(), pixels_.end(), [](float v) { return v >= 0.0f && v <= 1.0f; });
}

VideoTensor::VideoTensor(std::string id, std::vector<Frame> frames)
    : id_(std::move(id)), frames_(std::move(frames)) {
  if (frames_.empty()) {
    throw DataError("video '" + id_ + "' has zero frames");
  }
  for (const Frame& f : frames_) {
    if (!f.same_shape(frames_.front())) {
      throw DataError("video '" + id_ + "' mixes frame shapes");
    }
    if (!f.in_unit_range()) {
      throw DataError("video '" + id_ + "' has a pixel outside [0, 1]");
    }
  }
}

const Frame& VideoTensor::frame(std::size_t index) const {
  if (index < 1 || index > frames_.size()) {
    throw UsageError("frame index out of range: " + std::to_string(index));
  }
  return frames_[index - 1];
}

std::string_view to_string(Label label) {
  switch (label) {
    case Label::Spoof:
      return "spoof";
    case Label::Live:
      return "live";
    case Label::Unlabeled:
      return "unlabeled";
  }
  return "?";
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train:
      return "train";
    case Split::Val:
      return "val";
    case Split::Test:
      return "test";
  }
  return "?";
}

Label parse_label(std::string_view token) {
  if (token == "live") return Label::Live;
  if (token == "spoof") return Label::Spoof;
  if (token == "unlabeled") return Label::Unlabeled;
  throw DataError("unknown label '" + std::string(token) + "'");
}

Split parse_split(std::string_view token) {
  if (token == "train") return Split::Train;
  if (token == "val") return Split::Val;
  if (token == "test") return Split::Test;
  throw DataError("unknown split '" + std::string(token) + "'");
}

std::vector<ManifestEntry> DatasetManifest::select(Split split) const {
  std::vector<ManifestEntry> out;
  for (const auto& e : entries) {
    if (e.split == split) {
      out.push_back(e);
    }
  }
  return out;
}

DatasetManifest DatasetManifest::filter_domain(std::string_view domain) const {
  DatasetManifest out;
  for (const auto& e : entries) {
    if (e.domain_tag == domain) {
      out.entries.push_back(e);
    }
  }
  return out;
}

void write_video(const VideoTensor& video, const std::filesystem::path& path) {
  std::string bytes;
  const std::size_t per_frame = video.height() * video.width() * video.channels();
  bytes.reserve(kVideoHeaderBytes + 4 * per_frame * video.num_frames());
  bytes.append(kVideoMagic, 4);
  detail::append_le<std::uint32_t>(bytes, static_cast<std::uint32_t>(video.num_frames()));
  detail::append_le<std::uint32_t>(bytes, static_cast<std::uint32_t>(video.height()));
  detail::append_le<std::uint32_t>(bytes, static_cast<std::uint32_t>(video.width()));
  detail::append_le<std::uint32_t>(bytes, static_cast<std::uint32_t>(video.channels()));
  for (const Frame& f : video.frames()) {
    if (!f.in_unit_range()) {
      throw DataError("refusing to write pixel outside [0, 1]");
    }
    for (float v : f.pixels()) {
      detail::append_le<float>(bytes, v);
    }
  }
  detail::write_file(path.string(), bytes);
}

VideoTensor read_video(const std::filesystem::path& path) {
  const std::string bytes = detail::read_file(path.string());
  detail::ByteReader reader(bytes);
  if (bytes.size() < kVideoHeaderBytes) {
    throw DataError("truncated header in " + path.string());
  }
  if (reader.read_bytes(4) != std::string(kVideoMagic, 4)) {
    throw DataError("bad magic in " + path.string());
  }
  const auto n = reader.read_le<std::uint32_t>();
  const auto h = reader.read_le<std::uint32_t>();
  const auto w = reader.read_le<std::uint32_t>();
  const auto c = reader.read_le<std::uint32_t>();
  if (n == 0) {
    throw DataError("zero frames in " + path.string());
  }
  if (h == 0 || w == 0 || (c != 1 && c != 3)) {
    throw DataError("invalid dimensions in " + path.string());
  }
  const std::uint64_t per_frame = std::uint64_t{h} * w * c;
  const std::uint64_t expected = kVideoHeaderBytes + 4 * per_frame * n;
  if (bytes.size() < expected) {
    throw DataError("truncated payload in " + path.string());
  }
  if (bytes.size() > expected) {
    throw DataError("trailing bytes in " + path.string());
  }
  std::vector<Frame> frames;
  frames.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::vector<float> pixels(per_frame);
    for (auto& v : pixels) {
      v = reader.read_le<float>();
      if (!(v >= 0.0f && v <= 1.0f)) {
        throw DataError("pixel outside [0, 1] in " + path.string());
      }
    }
    frames.emplace_back(h, w, c, std::move(pixels));
  }
  return VideoTensor(path.stem().string(), std::move(frames));
}

void write_frame_image(const Frame& frame, const std::filesystem::path& path) {
  std::string bytes = (frame.channels() == 1 ? "P5\n" : "P6\n") + std::to_string(frame.width()) + " " +
                      std::to_string(frame.height()) + "\n255\n";
  bytes.reserve(bytes.size() + frame.size());
  for (float v : frame.pixels()) {
    const double clamped = std::clamp(static_cast<double>(v), 0.0, 1.0);
    bytes.push_back(static_cast<char>(static_cast<unsigned char>(std::floor(clamped * 255.0 + 0.5))));
  }
  detail::write_file(path.string(), bytes);
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open manifest: " + path.string());
  }
  const auto base = path.parent_path();
  DatasetManifest manifest;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') {
      continue;
    }
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = body.find(',', start);
      fields.push_back(trim(body.substr(start, comma == std::string_view::npos ? body.size() - start : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    const auto where = path.string() + ":" + std::to_string(line_no);
    if (fields.size() != 4) {
      throw DataError(where + ": expected 4 fields `path,label,split,domain_tag`");
    }
    ManifestEntry entry;
    const std::filesystem::path video{std::string(fields[0])};
    entry.video_path = video.is_absolute() ? video : base / video;
    entry.label = parse_label(fields[1]);
    entry.split = parse_split(fields[2]);
    entry.domain_tag = std::string(fields[3]);
    const auto key = entry.video_path.lexically_normal().string();
    if (!seen.insert(key).second) {
      throw DataError(where + ": duplicate path " + std::string(fields[0]));
    }
    if (!std::filesystem::exists(entry.video_path)) {
      throw DataError(where + ": missing file " + entry.video_path.string());
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw DataError("cannot open manifest for writing: " + path.string());
  }
  for (const auto& e : manifest.entries) {
    out << e.video_path.generic_string() << ',' << to_string(e.label) << ',' << to_string(e.split) << ','
        << e.domain_tag << '\n';
  }
}

}  // namespace apexfas
