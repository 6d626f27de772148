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

#include "apexfas/segmenter.hpp"

#include "apexfas/error.hpp"

namespace apexfas {

std::vector<Segment> split_segments(const VideoTensor& video, std::size_t t) {
  if (t == 0) {
    throw UsageError("temporal length t must be >= 1");
  }
  const std::size_t n = video.num_frames();
  const std::span<const Frame> all(video.frames());
  std::vector<Segment> segments;
  for (std::size_t start = 1; start <= n; start += t) {
    const std::size_t end = std::min(n, start + t - 1);
    const std::size_t len = end - start + 1;
    if (len < t && len < kMinSegmentLength) {
      break;
    }
    segments.push_back({video.id(), start, end, all.subspan(start - 1, len)});
  }
  return segments;
}

ApexFrame segment_apex(const Segment& segment, double sigma) {
  const std::size_t n = segment.length();
  if (segment.start < 1 || segment.end < segment.start || segment.frames.size() != n) {
    throw UsageError("segment bounds do not match its frames");
  }
  const auto weights = normalize_weights(gaussian_weights(n, central_index(n), sigma));
  ApexFrame apex;
  apex.frame = weighted_sum(segment.frames, weights.values);
  apex.source_id = segment.source_id;
  apex.segment_start = segment.start;
  apex.segment_end = segment.end;
  apex.sigma = sigma;
  return apex;
}

UnlabeledPool build_unlabeled_pool(std::span<const VideoTensor> videos,
                                   const std::vector<std::size_t>& temporal_lengths, double sigma) {
  if (videos.empty() || temporal_lengths.empty()) {
    throw UsageError("build_unlabeled_pool requires videos and temporal lengths");
  }
  UnlabeledPool pool;
  pool.temporal_lengths = temporal_lengths;
  pool.sigma = sigma;
  for (const VideoTensor& video : videos) {
    for (std::size_t t : temporal_lengths) {
      for (const Segment& seg : split_segments(video, t)) {
        pool.apexes.push_back(segment_apex(seg, sigma));
      }
    }
  }
  return pool;
}

std::size_t expected_segment_count(std::size_t n, std::size_t t) {
  if (t == 0) {
    throw UsageError("temporal length t must be >= 1");
  }
  return n / t + (n % t >= kMinSegmentLength ? 1 : 0);
}

}  // namespace apexfas
