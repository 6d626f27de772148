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

#include "apexfas/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "apexfas/error.hpp"

namespace apexfas {

ScoreSet::ScoreSet(std::vector<ScoredSample> items) {
  items_.reserve(items.size());
  for (const auto& s : items) add(s.score, s.live);
}

void ScoreSet::add(double score, bool live) {
  if (!std::isfinite(score) || score < 0.0 || score > 1.0) {
    throw DataError("score must lie in [0, 1], got " + std::to_string(score));
  }
  items_.push_back({score, live});
  if (live) ++num_live_;
}

void ScoreSet::require_both_classes(const char* operation) const {
  if (num_live_ == 0 || num_spoof() == 0) {
    throw DataError(std::string(operation) + " needs both live and spoof scores (got " + std::to_string(num_live_) +
                    " live, " + std::to_string(num_spoof()) + " spoof)");
  }
}

RocCurve roc_curve(const ScoreSet& scores) {
  scores.require_both_classes("roc_curve");
  auto items = scores.items();
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
  const double n_live = static_cast<double>(scores.num_live());
  const double n_spoof = static_cast<double>(scores.num_spoof());
  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t k = 0; k < items.size();) {
    const double t = items[k].score;
    // Equal scores cross the threshold together.
    while (k < items.size() && items[k].score == t) {
      if (items[k].live) {
        ++tp;
      } else {
        ++fp;
      }
      ++k;
    }
    curve.points.push_back({t, static_cast<double>(fp) / n_spoof, static_cast<double>(tp) / n_live});
  }
  return curve;
}

double auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    const auto& a = curve.points[k - 1];
    const auto& b = curve.points[k];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  return area;
}

double auc(const ScoreSet& scores) { return auc(roc_curve(scores)); }

ErrorRates error_rates(const ScoreSet& scores, double threshold) {
  scores.require_both_classes("hter");
  std::size_t false_accepts = 0;
  std::size_t false_rejects = 0;
  for (const auto& s : scores.items()) {
    if (s.live && s.score < threshold) ++false_rejects;
    if (!s.live && s.score >= threshold) ++false_accepts;
  }
  return {static_cast<double>(false_accepts) / static_cast<double>(scores.num_spoof()),
          static_cast<double>(false_rejects) / static_cast<double>(scores.num_live())};
}

double hter(const ScoreSet& scores, double threshold) { return error_rates(scores, threshold).hter(); }

EerResult eer_threshold(const ScoreSet& scores) {
  scores.require_both_classes("eer_threshold");
  auto items = scores.items();
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.score < b.score; });
  const double n_live = static_cast<double>(scores.num_live());
  const double n_spoof = static_cast<double>(scores.num_spoof());

  // Sweep upward: below-threshold counts grow as each tie group is passed.
  std::size_t live_below = 0;
  std::size_t spoof_below = 0;
  EerResult best;
  double best_gap = std::numeric_limits<double>::infinity();
  auto consider = [&](double threshold) {
    const ErrorRates r{(n_spoof - static_cast<double>(spoof_below)) / n_spoof, static_cast<double>(live_below) / n_live};
    const double gap = std::abs(r.far - r.frr);
    if (gap < best_gap) {
      best_gap = gap;
      best = {threshold, r.hter(), r};
    }
  };
  consider(items.front().score);
  for (std::size_t k = 0; k < items.size();) {
    const double t = items[k].score;
    while (k < items.size() && items[k].score == t) {
      if (items[k].live) {
        ++live_below;
      } else {
        ++spoof_below;
      }
      ++k;
    }
    double next = std::nextafter(t, std::numeric_limits<double>::infinity());
    if (k < items.size()) {
      // Adjacent doubles can round the midpoint down onto t.
      const double mid = 0.5 * (t + items[k].score);
      next = mid > t ? mid : items[k].score;
    }
    consider(next);
  }
  return best;
}

EvalReport evaluate_transfer(const ScoreSet& source, const ScoreSet& target) {
  const auto eer = eer_threshold(source);
  const auto rates = error_rates(target, eer.threshold);
  EvalReport report;
  report.source_eer = eer.eer;
  report.threshold = eer.threshold;
  report.target_far = rates.far;
  report.target_frr = rates.frr;
  report.target_hter = rates.hter();
  report.target_roc = roc_curve(target);
  report.target_auc = auc(report.target_roc);
  return report;
}

void write_roc_csv(const RocCurve& curve, std::ostream& out) {
  out << "threshold,fpr,tpr\n";
  out << std::setprecision(17);
  for (const auto& p : curve.points) {
    if (std::isinf(p.threshold)) {
      out << "inf";
    } else {
      out << p.threshold;
    }
    out << ',' << p.fpr << ',' << p.tpr << '\n';
  }
}

void write_roc_svg(const RocCurve& curve, std::ostream& out, const std::string& title) {
  constexpr double kSize = 400.0;
  constexpr double kMargin = 50.0;
  auto x = [&](double fpr) { return kMargin + fpr * kSize; };
  auto y = [&](double tpr) { return kMargin + (1.0 - tpr) * kSize; };
  const double total = kSize + 2 * kMargin;
  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << total << "\" height=\"" << total
      << "\" viewBox=\"0 0 " << total << ' ' << total << "\">\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"" << total << "\" height=\"" << total << "\" fill=\"white\"/>\n";
  out << "  <rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kSize << "\" height=\"" << kSize
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "  <line x1=\"" << x(0) << "\" y1=\"" << y(0) << "\" x2=\"" << x(1) << "\" y2=\"" << y(1)
      << "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
  out << "  <polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (std::size_t k = 0; k < curve.points.size(); ++k) {
    if (k) out << ' ';
    out << x(curve.points[k].fpr) << ',' << y(curve.points[k].tpr);
  }
  out << "\"/>\n";
  out << "  <text x=\"" << total / 2 << "\" y=\"" << kMargin / 2 << "\" text-anchor=\"middle\">" << title
      << " (AUC " << std::setprecision(4) << auc(curve) << ")</text>\n";
  out << std::setprecision(2);
  out << "  <text x=\"" << total / 2 << "\" y=\"" << total - 12 << "\" text-anchor=\"middle\">FPR</text>\n";
  out << "  <text x=\"14\" y=\"" << total / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << total / 2
      << ")\">TPR</text>\n";
  out << "</svg>\n";
  out.unsetf(std::ios::floatfield);
}

void write_eval_report(const EvalReport& report, std::ostream& out) {
  out << std::setprecision(17);
  out << "eer=" << report.source_eer << '\n';
  out << "threshold=" << report.threshold << '\n';
  out << "hter=" << report.target_hter << '\n';
  out << "far=" << report.target_far << '\n';
  out << "frr=" << report.target_frr << '\n';
  out << "auc=" << report.target_auc << '\n';
}

}  // namespace apexfas
