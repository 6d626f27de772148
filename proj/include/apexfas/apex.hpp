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
#include <span>
#include <vector>

#include "apexfas/tensor_io.hpp"

namespace apexfas {

inline constexpr double kDefaultSigma = 5.0;

/// Per-frame Gaussian weights, raw (peak 1 at the center) or normalized to
/// sum 1. values[k] belongs to frame index k + 1.
struct WeightVector {
  std::vector<double> values;
  bool normalized = false;
  double center = 1.0;
  double sigma = kDefaultSigma;
};

/// (n + 1) / 2: the middle frame for odd n, the half-integer between the two
/// middle frames for even n.
double central_index(std::size_t n);

/// values[i - 1] = exp(-(i - center)^2 / (2 sigma^2)) for i = 1..n.
WeightVector gaussian_weights(std::size_t n, double center, double sigma);

WeightVector normalize_weights(const WeightVector& raw);

/// Per-pixel weighted sum of `frames`. Accumulates in double and rounds once
/// to float, so the output stays inside the per-pixel input range.
Frame weighted_sum(std::span<const Frame> frames, std::span<const double> weights);

/// Gaussian-weighted apex of the whole video, centered on central_index(N).
ApexFrame apex_frame(const VideoTensor& video, double sigma = kDefaultSigma);

}  // namespace apexfas
