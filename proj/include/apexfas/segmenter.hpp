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
#include <string>
#include <vector>

#include "apexfas/apex.hpp"
#include "apexfas/tensor_io.hpp"

namespace apexfas {

inline const std::vector<std::size_t> kDefaultTemporalLengths = {50, 80};

/// Trailing partial segments shorter than this are dropped.
inline constexpr std::size_t kMinSegmentLength = 3;

/// Consecutive frame range [start, end] (1-based, inclusive) of one video.
/// `frames` views into the source video, which must outlive the segment.
struct Segment {
  std::string source_id;
  std::size_t start = 1;
  std::size_t end = 1;
  std::span<const Frame> frames;

  std::size_t length() const noexcept { return end - start + 1; }
};

struct UnlabeledPool {
  std::vector<ApexFrame> apexes;
  std::vector<std::size_t> temporal_lengths;
  double sigma = kDefaultSigma;
};

/// Non-overlapping windows [1..t], [t+1..2t], ...; a trailing partial window
/// is kept only if it holds at least kMinSegmentLength frames. When t >= N the
/// whole video is one (possibly partial) window, so videos shorter than
/// kMinSegmentLength yield nothing unless t == N.
std::vector<Segment> split_segments(const VideoTensor& video, std::size_t t);

/// Gaussian apex of one segment, centered on the segment's own middle.
ApexFrame segment_apex(const Segment& segment, double sigma = kDefaultSigma);

/// Apexes ordered by (video, temporal length, segment).
UnlabeledPool build_unlabeled_pool(std::span<const VideoTensor> videos,
                                   const std::vector<std::size_t>& temporal_lengths = kDefaultTemporalLengths,
                                   double sigma = kDefaultSigma);

/// floor(n / t) + [n mod t >= kMinSegmentLength].
std::size_t expected_segment_count(std::size_t n, std::size_t t);

}  // namespace apexfas
