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

#include "apexfas/apex.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "apexfas/error.hpp"

namespace apexfas {

double central_index(std::size_t n) {
  if (n == 0) {
    throw UsageError("central_index requires at least one frame");
  }
  return (static_cast<double>(n) + 1.0) / 2.0;
}

WeightVector gaussian_weights(std::size_t n, double center, double sigma) {
  if (n == 0) {
    throw UsageError("gaussian_weights requires at least one frame");
  }
  if (!std::isfinite(center) || !std::isfinite(sigma)) {
    throw NumericError("gaussian_weights: non-finite center or sigma");
  }
  if (!(sigma > 0.0)) {
    throw UsageError("sigma must be > 0, got " + std::to_string(sigma));
  }
  WeightVector w;
  w.center = center;
  w.sigma = sigma;
  w.values.resize(n);
  const double denom = 2.0 * sigma * sigma;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = static_cast<double>(k + 1) - center;
    w.values[k] = std::exp(-(d * d) / denom);
  }
  return w;
}

WeightVector normalize_weights(const WeightVector& raw) {
  if (raw.values.empty()) {
    throw UsageError("normalize_weights: empty weight vector");
  }
  const double total = std::accumulate(raw.values.begin(), raw.values.end(), 0.0);
  if (!std::isfinite(total) || !(total > 0.0)) {
    throw NumericError("normalize_weights: weight sum is zero or non-finite");
  }
  WeightVector out = raw;
  for (double& v : out.values) {
    v /= total;
  }
  out.normalized = true;
  return out;
}

Frame weighted_sum(std::span<const Frame> frames, std::span<const double> weights) {
  if (frames.empty() || frames.size() != weights.size()) {
    throw UsageError("weighted_sum: frame and weight counts differ");
  }
  const Frame& first = frames.front();
  std::vector<double> acc(first.size(), 0.0);
  for (std::size_t k = 0; k < frames.size(); ++k) {
    if (!frames[k].same_shape(first)) {
      throw DataError("weighted_sum: frame shapes differ");
    }
    const double w = weights[k];
    const auto& px = frames[k].pixels();
    for (std::size_t p = 0; p < acc.size(); ++p) {
      acc[p] += w * static_cast<double>(px[p]);
    }
  }
  std::vector<float> out(acc.size());
  for (std::size_t p = 0; p < acc.size(); ++p) {
    out[p] = static_cast<float>(acc[p]);
  }
  return Frame(first.height(), first.width(), first.channels(), std::move(out));
}

ApexFrame apex_frame(const VideoTensor& video, double sigma) {
  const std::size_t n = video.num_frames();
  const auto weights = normalize_weights(gaussian_weights(n, central_index(n), sigma));
  ApexFrame apex;
  apex.frame = weighted_sum(video.frames(), weights.values);
  apex.source_id = video.id();
  apex.segment_start = 1;
  apex.segment_end = n;
  apex.sigma = sigma;
  return apex;
}

}  // namespace apexfas
