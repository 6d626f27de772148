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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <numeric>

#include "apexfas/apex.hpp"
#include "apexfas/error.hpp"
#include "test_util.hpp"

using namespace apexfas;
using apexfas::testing::max_abs_diff;
using apexfas::testing::oracle_apex;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

VideoTensor constant_frames_video(const std::vector<float>& levels) {
  std::vector<Frame> frames;
  for (float v : levels) frames.push_back(apexfas::testing::constant_frame(2, 2, v));
  return VideoTensor("levels", std::move(frames));
}

}  // namespace

TEST_CASE("central_index") {
  CHECK(central_index(5) == 3.0);
  CHECK(central_index(1) == 1.0);
  CHECK(central_index(50) == 25.5);
  CHECK_THROWS_AS(central_index(0), UsageError);
}

TEST_CASE("gaussian_weights: values and errors") {
  const auto w5 = gaussian_weights(5, 3.0, 5.0);
  CHECK_FALSE(w5.normalized);
  CHECK(w5.values[2] == 1.0);

  const auto w3 = gaussian_weights(3, 2.0, 1.0);
  const long double e = std::exp(-0.5L);
  CHECK(w3.values[0] == doctest::Approx(static_cast<double>(e)).epsilon(1e-15));
  CHECK(w3.values[1] == 1.0);
  CHECK(w3.values[2] == w3.values[0]);
  CHECK(w3.values[0] == doctest::Approx(0.6065307).epsilon(1e-7));

  CHECK_THROWS_WITH_AS(gaussian_weights(3, 2.0, 0.0), doctest::Contains("sigma"), UsageError);
  CHECK_THROWS_AS(gaussian_weights(3, 2.0, -1.0), UsageError);
  CHECK_THROWS_AS(gaussian_weights(3, std::numeric_limits<double>::quiet_NaN(), 1.0), NumericError);
  CHECK_THROWS_AS(gaussian_weights(3, 2.0, std::numeric_limits<double>::infinity()), NumericError);
  CHECK_THROWS_AS(gaussian_weights(0, 1.0, 1.0), UsageError);
}

TEST_CASE("gaussian_weights: raw values lie in (0,1] and peak nearest the center") {
  for (std::size_t n : {1u, 2u, 7u, 50u, 121u}) {
    const auto w = gaussian_weights(n, central_index(n), 5.0);
    const auto peak = std::max_element(w.values.begin(), w.values.end()) - w.values.begin();
    CHECK(std::abs(static_cast<double>(peak + 1) - central_index(n)) <= 0.5);
    for (double v : w.values) {
      CHECK(v > 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("gaussian_weights: symmetry about an integer center") {
  for (std::size_t n = 1; n <= 41; n += 2) {
    const auto c = static_cast<std::size_t>(central_index(n));
    const auto w = gaussian_weights(n, static_cast<double>(c), 3.0);
    for (std::size_t k = 1; k < c; ++k) CHECK(w.values[c - 1 - k] == w.values[c - 1 + k]);
  }
}

TEST_CASE("gaussian_weights: shift covariance over the overlapping range") {
  for (int d : {1, 2, 5}) {
    const auto a = gaussian_weights(20, 8.0, 2.5);
    const auto b = gaussian_weights(20, 8.0 + d, 2.5);
    for (std::size_t i = 0; i + d < 20; ++i) CHECK(a.values[i] == doctest::Approx(b.values[i + d]).epsilon(1e-15));
  }
}

TEST_CASE("normalize_weights") {
  WeightVector uniform{{1, 1, 1, 1}, false, 2.5, 1.0};
  const auto u = normalize_weights(uniform);
  CHECK(u.normalized);
  for (double v : u.values) CHECK(v == 0.25);

  WeightVector single{{0.7}, false, 1.0, 1.0};
  CHECK(normalize_weights(single).values[0] == 1.0);

  const auto n3 = normalize_weights(gaussian_weights(3, 2.0, 1.0));
  const long double e = std::exp(-0.5L), total = 1.0L + 2.0L * e;
  CHECK(n3.values[0] == doctest::Approx(static_cast<double>(e / total)).epsilon(1e-15));
  CHECK(n3.values[1] == doctest::Approx(static_cast<double>(1.0L / total)).epsilon(1e-15));
  CHECK(n3.values[0] == doctest::Approx(0.274068).epsilon(1e-6));
  CHECK(n3.values[1] == doctest::Approx(0.451862).epsilon(1e-6));

  WeightVector zeros{{0.0, 0.0}, false, 1.5, 1.0};
  CHECK_THROWS_AS(normalize_weights(zeros), NumericError);
  WeightVector empty{{}, false, 1.0, 1.0};
  CHECK_THROWS_AS(normalize_weights(empty), UsageError);
  WeightVector inf{{1.0, std::numeric_limits<double>::infinity()}, false, 1.5, 1.0};
  CHECK_THROWS_AS(normalize_weights(inf), NumericError);
}

TEST_CASE("normalized weights sum to 1 for every n and sigma") {
  for (double sigma : {0.5, 1.0, 5.0, 50.0}) {
    for (std::size_t n = 1; n <= 500; ++n) {
      const auto w = normalize_weights(gaussian_weights(n, central_index(n), sigma));
      REQUIRE(std::abs(sum(w.values) - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("apex_frame: closed-form examples") {
  SUBCASE("identical frames") {
    std::mt19937_64 rng(1);
    const auto f = apexfas::testing::random_frame(rng, 4, 4, 3);
    const auto apex = apex_frame(VideoTensor("same", {f, f, f, f, f}), 2.0);
    CHECK(apex.frame == f);
  }
  SUBCASE("0, 0.5, 1 averages to 0.5 for any sigma") {
    for (double sigma : {0.1, 1.0, 5.0, 100.0}) {
      const auto apex = apex_frame(constant_frames_video({0.0f, 0.5f, 1.0f}), sigma);
      for (float p : apex.frame.pixels()) CHECK(p == doctest::Approx(0.5).epsilon(1e-7));
    }
  }
  SUBCASE("two frames are weighted equally") {
    const auto apex = apex_frame(constant_frames_video({0.0f, 1.0f}), 1.0);
    for (float p : apex.frame.pixels()) CHECK(p == 0.5f);
  }
  SUBCASE("provenance") {
    const auto apex = apex_frame(constant_frames_video({0.1f, 0.2f, 0.3f, 0.4f}));
    CHECK(apex.source_id == "levels");
    CHECK(apex.segment_start == 1);
    CHECK(apex.segment_end == 4);
    CHECK(apex.sigma == kDefaultSigma);
    CHECK(kDefaultSigma == 5.0);
  }
  SUBCASE("sigma must be positive") {
    CHECK_THROWS_AS(apex_frame(constant_frames_video({0.1f}), 0.0), UsageError);
  }
}

TEST_CASE("weighted_sum rejects mismatched inputs") {
  const std::vector<Frame> frames = {Frame(2, 2, 1), Frame(2, 2, 1)};
  const std::vector<double> one = {1.0};
  CHECK_THROWS_AS(weighted_sum(frames, one), UsageError);
  CHECK_THROWS_AS(weighted_sum({}, {}), UsageError);
}

TEST_CASE("apex_frame: convexity, limits and oracle on random videos") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> len(1, 60);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = len(rng);
    const auto video = apexfas::testing::random_video(rng, n, 8, 8);
    const auto apex = apex_frame(video, 5.0);
    for (std::size_t p = 0; p < apex.frame.size(); ++p) {
      float lo = 1.0f, hi = 0.0f;
      for (const auto& f : video.frames()) {
        lo = std::min(lo, f.pixels()[p]);
        hi = std::max(hi, f.pixels()[p]);
      }
      REQUIRE(apex.frame.pixels()[p] >= lo);
      REQUIRE(apex.frame.pixels()[p] <= hi);
    }
    CHECK(max_abs_diff(apex.frame.pixels(), oracle_apex(video.frames(), 0, n, 5.0L)) < 1e-6);
  }
}

TEST_CASE("apex_frame: sigma limits") {
  std::mt19937_64 rng(12);
  const auto odd = apexfas::testing::random_video(rng, 9, 8, 8);
  const auto sharp = apex_frame(odd, 1e-3);
  CHECK(sharp.frame == odd.frame(5));

  const auto wide = apex_frame(odd, 1e6);
  std::vector<long double> mean(odd.frame(1).size(), 0.0L);
  for (const auto& f : odd.frames())
    for (std::size_t p = 0; p < mean.size(); ++p) mean[p] += f.pixels()[p] / 9.0L;
  CHECK(max_abs_diff(wide.frame.pixels(), mean) < 1e-6);
}
