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
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace apexfas {

/// Live is the positive class; a sample is accepted as live iff
/// score >= threshold.
struct ScoredSample {
  double score = 0.0;  // live-probability in [0, 1]
  bool live = false;
};

class ScoreSet {
 public:
  ScoreSet() = default;
  explicit ScoreSet(std::vector<ScoredSample> items);

  void add(double score, bool live);
  const std::vector<ScoredSample>& items() const noexcept { return items_; }
  std::size_t num_live() const noexcept { return num_live_; }
  std::size_t num_spoof() const noexcept { return items_.size() - num_live_; }
  bool empty() const noexcept { return items_.empty(); }
  /// Throws DataError unless both classes are present.
  void require_both_classes(const char* operation) const;

 private:
  std::vector<ScoredSample> items_;
  std::size_t num_live_ = 0;
};

struct RocPoint {
  double threshold = 0.0;  // +inf for the (0, 0) origin
  double fpr = 0.0;
  double tpr = 0.0;
};

/// Points ordered by threshold descending, from (0, 0) to (1, 1), one per
/// distinct score.
struct RocCurve {
  std::vector<RocPoint> points;
};

struct ErrorRates {
  double far = 0.0;  // spoof accepted as live
  double frr = 0.0;  // live rejected
  double hter() const noexcept { return 0.5 * (far + frr); }
};

struct EerResult {
  double threshold = 0.0;
  double eer = 0.0;
  ErrorRates rates;
};

struct EvalReport {
  double source_eer = 0.0;
  double threshold = 0.0;
  double target_hter = 0.0;
  double target_far = 0.0;
  double target_frr = 0.0;
  double target_auc = 0.0;
  RocCurve target_roc;
};

RocCurve roc_curve(const ScoreSet& scores);
/// Trapezoidal area under the curve.
double auc(const RocCurve& curve);
double auc(const ScoreSet& scores);

ErrorRates error_rates(const ScoreSet& scores, double threshold);
double hter(const ScoreSet& scores, double threshold);

/// Candidate thresholds are the lowest score (accept all), the midpoints of
/// adjacent distinct scores, and just above the highest score (reject all).
/// Picks the candidate minimizing |FAR - FRR| (lowest threshold on ties);
/// eer = (FAR + FRR) / 2 there.
EerResult eer_threshold(const ScoreSet& scores);

/// Calibrates the EER threshold on `source` and applies it to `target`.
EvalReport evaluate_transfer(const ScoreSet& source, const ScoreSet& target);

/// `threshold,fpr,tpr` with a header row.
void write_roc_csv(const RocCurve& curve, std::ostream& out);
/// Self-contained SVG with axes, the chance diagonal and the ROC polyline.
void write_roc_svg(const RocCurve& curve, std::ostream& out, const std::string& title = "ROC");
/// Flat key=value lines: eer, threshold, hter, far, frr, auc.
void write_eval_report(const EvalReport& report, std::ostream& out);

}  // namespace apexfas
