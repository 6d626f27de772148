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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "apexfas/tensor_io.hpp"

namespace apexfas {

/// Acquisition conditions that differ between synthetic "datasets".
struct DomainParams {
  std::string name;
  double background = 0.3;
  double noise_scale = 0.04;
  double texture_period = 4.0;  // pixels
};

/// Both classes show a bright Gaussian blob drifting along a smooth path.
/// Spoof videos add a static periodic grid texture and per-frame brightness
/// flicker. An optional linear brightness ramp (+ for live, - for spoof)
/// gives the classes a temporal signature that a centered apex cancels out.
struct SynthConfig {
  std::size_t videos_per_class = 25;  // per domain
  std::size_t frames = 120;
  std::size_t height = 32;
  std::size_t width = 32;
  std::vector<DomainParams> domains = {{"domA", 0.30, 0.04, 4.0}, {"domB", 0.34, 0.06, 4.0}};
  double blob_intensity = 0.4;
  double blob_radius = 5.0;
  double motion_amplitude = 3.0;
  double texture_amplitude = 0.08;
  double flicker_amplitude = 0.05;
  double temporal_drift = 0.0;
  std::uint64_t seed = 7;

  void validate() const;
};

/// Applies one `key=value` setting. Domains use
/// `domains=name:background:noise:period;name:...`.
void apply_synth_setting(SynthConfig& config, std::string_view key, std::string_view value);
/// Reads `key=value` lines ('#' comments allowed) on top of the defaults.
SynthConfig parse_synth_config(std::istream& in);
/// Resolved configuration as `key=value` lines accepted by parse_synth_config.
void write_synth_config(const SynthConfig& config, std::ostream& out);

/// Deterministic in (config, domain, label, index).
VideoTensor synthesize_video(const SynthConfig& config, std::size_t domain, Label label, std::size_t index);

/// Writes `{domain}_{label}_{index}.afv` files plus `manifest.csv` into
/// out_dir. Each (domain, class) group is split 60/20/20 into
/// train/val/test by a seeded shuffle. Returned paths include out_dir.
DatasetManifest generate_dataset(const SynthConfig& config, const std::filesystem::path& out_dir);

/// Mean squared difference between horizontally and vertically adjacent
/// cells of the frame's pooled features.
double high_frequency_energy(const Frame& frame);

/// AUC of the fixed rule "lower high-frequency energy of the apex means live"
/// over every labeled entry of the manifest.
double class_separability_check(const DatasetManifest& manifest, double sigma = 5.0);

}  // namespace apexfas
