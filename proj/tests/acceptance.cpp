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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is non-zero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "apexfas/apex.hpp"
#include "apexfas/metrics.hpp"
#include "apexfas/model.hpp"
#include "apexfas/segmenter.hpp"
#include "apexfas/synth.hpp"
#include "apexfas/trainer.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace apexfas;
using apexfas::testing::TempDir;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  std::string name;
  double time_limit_s;
  std::function<Outcome()> body;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome weight_correctness() {
  double worst_sum = 0.0, worst_sym = 0.0;
  for (double sigma : {0.5, 1.0, 5.0, 50.0}) {
    for (std::size_t n = 1; n <= 500; ++n) {
      const auto w = normalize_weights(gaussian_weights(n, central_index(n), sigma));
      double total = 0.0;
      for (double v : w.values) total += v;
      worst_sum = std::max(worst_sum, std::abs(total - 1.0));
      if (n % 2 == 1) {
        const std::size_t c = (n + 1) / 2;
        for (std::size_t k = 1; k < c; ++k)
          worst_sym = std::max(worst_sym, std::abs(w.values[c - 1 - k] - w.values[c - 1 + k]));
      }
    }
  }
  return {worst_sum <= 1e-9 && worst_sym <= 1e-12,
          "max |sum-1| " + fmt("%.3g", worst_sum) + ", max asymmetry " + fmt("%.3g", worst_sym)};
}

Outcome apex_convexity_and_limits() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> len(1, 60);
  std::size_t outside = 0;
  double worst_sharp = 0.0, worst_wide = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = len(rng);
    const auto video = apexfas::testing::random_video(rng, n, 8, 8);
    const auto apex = apex_frame(video, kDefaultSigma).frame.pixels();
    std::vector<long double> mean(apex.size(), 0.0L);
    for (std::size_t p = 0; p < apex.size(); ++p) {
      float lo = 1.0f, hi = 0.0f;
      for (const auto& f : video.frames()) {
        lo = std::min(lo, f.pixels()[p]);
        hi = std::max(hi, f.pixels()[p]);
        mean[p] += f.pixels()[p];
      }
      mean[p] /= static_cast<long double>(n);
      if (apex[p] < lo || apex[p] > hi) ++outside;
    }
    worst_wide = std::max(worst_wide, apexfas::testing::max_abs_diff(apex_frame(video, 1e6).frame.pixels(), mean));
    if (n % 2 == 1) {
      const auto sharp = apex_frame(video, 1e-3).frame.pixels();
      const auto& center = video.frame((n + 1) / 2).pixels();
      for (std::size_t p = 0; p < sharp.size(); ++p)
        worst_sharp = std::max(worst_sharp, static_cast<double>(std::abs(sharp[p] - center[p])));
    }
  }
  return {outside == 0 && worst_sharp < 1e-6 && worst_wide < 1e-6,
          std::to_string(outside) + " pixels outside hull, sigma=1e-3 err " + fmt("%.3g", worst_sharp) +
              ", sigma=1e6 err " + fmt("%.3g", worst_wide)};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> len(1, 10);
  std::uniform_real_distribution<double> sig(0.3, 20.0);
  double worst_apex = 0.0, worst_seg = 0.0, worst_full = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = len(rng);
    const double sigma = sig(rng);
    const auto video = apexfas::testing::random_video(rng, n, 4, 4);
    worst_apex = std::max(worst_apex, apexfas::testing::max_abs_diff(apex_frame(video, sigma).frame.pixels(),
                                                                      apexfas::testing::oracle_apex(video.frames(), 0, n, sigma)));
    for (std::size_t t = 1; t <= n + 1; ++t) {
      for (const auto& seg : split_segments(video, t)) {
        worst_seg = std::max(worst_seg, apexfas::testing::max_abs_diff(
                                            segment_apex(seg, sigma).frame.pixels(),
                                            apexfas::testing::oracle_apex(video.frames(), seg.start - 1, seg.length(), sigma)));
      }
    }
    const auto whole = split_segments(video, n);
    if (!whole.empty()) {
      const auto a = segment_apex(whole.front(), sigma).frame.pixels();
      const auto b = apex_frame(video, sigma).frame.pixels();
      for (std::size_t p = 0; p < a.size(); ++p)
        worst_full = std::max(worst_full, static_cast<double>(std::abs(a[p] - b[p])));
    }
  }
  return {worst_apex <= 1e-6 && worst_seg <= 1e-6 && worst_full <= 1e-12,
          "apex err " + fmt("%.3g", worst_apex) + ", segment err " + fmt("%.3g", worst_seg) +
              ", full-segment vs apex " + fmt("%.3g", worst_full)};
}

Outcome gradient_checks() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> dim(1, 12), hid(1, 8), len(1, 4);
  double worst_mlp = 0.0, worst_lstm = 0.0;
  const int instances = 60;
  for (int k = 0; k < instances; ++k) {
    const std::size_t d = dim(rng), h = hid(rng);
    const int label = k % 2;
    auto mlp = MlpParams::zeros(d, h);
    oracle::randomize(mlp, rng, 0.8);
    const auto x = oracle::random_features(rng, d);
    const auto gm = mlp_gradients(mlp, x.values, label);
    worst_mlp = std::max(worst_mlp, oracle::max_fd_relative_error(mlp, gm.grad, [&](const MlpParams& q) {
                           return oracle::ce_from_logits(oracle::mlp_logits(q, x.values), label);
                         }));

    auto lstm = LstmParams::zeros(d, h);
    oracle::randomize(lstm, rng, 0.6);
    std::vector<FeatureVector> seq;
    for (std::size_t t = len(rng); t > 0; --t) seq.push_back(oracle::random_features(rng, d));
    const auto gl = lstm_gradients(lstm, seq, label);
    worst_lstm = std::max(worst_lstm, oracle::max_fd_relative_error(lstm, gl.grad, [&](const LstmParams& q) {
                            return oracle::ce_from_logits(oracle::lstm_logits(q, seq), label);
                          }));
  }
  return {worst_mlp < 1e-4 && worst_lstm < 1e-4, std::to_string(instances) + "+" + std::to_string(instances) +
                                                     " instances, max rel err MLP " + fmt("%.3g", worst_mlp) +
                                                     ", LSTM " + fmt("%.3g", worst_lstm)};
}

Outcome metric_oracles() {
  std::mt19937_64 rng(5150);
  std::uniform_int_distribution<int> size(2, 30), coarse(0, 8);
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = size(rng);
    const bool ties = coin(rng);
    std::vector<double> live, spoof;
    ScoreSet s;
    for (int k = 0; k < n; ++k) {
      const double v = ties ? coarse(rng) / 8.0 : unit(rng);
      const bool is_live = k == 0 ? true : (k == 1 ? false : coin(rng));
      (is_live ? live : spoof).push_back(v);
      s.add(v, is_live);
    }
    worst = std::max(worst, std::abs(auc(s) - oracle::pairwise_auc(live, spoof)));
  }
  ScoreSet fixed;
  fixed.add(0.1, false);
  fixed.add(0.4, false);
  fixed.add(0.35, true);
  fixed.add(0.8, true);
  const double fixed_auc = auc(fixed);
  const auto eer = eer_threshold(fixed);
  return {worst <= 1e-12 && fixed_auc == 0.75 && eer.eer == 0.25,
          "max |auc - pairwise| " + fmt("%.3g", worst) + "; fixed example AUC " + fmt("%.6g", fixed_auc) +
              " (want 0.75), EER " + fmt("%.6g", eer.eer) + " (want 0.25) at threshold " +
              fmt("%.6g", eer.threshold) + " with FAR " + fmt("%.3g", eer.rates.far) + ", FRR " +
              fmt("%.3g", eer.rates.frr)};
}

DatasetManifest default_dataset(const TempDir& dir, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.seed = seed;
  return generate_dataset(cfg, dir.path());
}

Outcome combined_loss_ledger() {
  TempDir dir("apexfas_ledger");
  const auto manifest = default_dataset(dir, 7).filter_domain("domA");
  TrainConfig cfg;
  cfg.max_steps = 500;
  cfg.early_stop_patience = 1000;
  const auto pool = pool_from_manifest(manifest, cfg);
  const auto report = train_semi_supervised(manifest, pool, cfg).second;
  double worst = 0.0, min_conf = 1.0;
  std::size_t warmup_violations = 0, accepted = 0;
  for (const auto& s : report.steps) {
    worst = std::max(worst, std::abs(s.loss_total - (s.loss_labeled + cfg.lambda * s.loss_unlabeled)));
    if (s.step <= cfg.warmup_steps && (cfg.lambda * s.loss_unlabeled != 0.0 || s.accepted != 0)) ++warmup_violations;
    if (s.accepted > 0) min_conf = std::min(min_conf, s.min_accepted_confidence);
    accepted += s.accepted;
  }
  const bool ok = report.steps.size() == 500 && worst <= 1e-12 && warmup_violations == 0 &&
                  min_conf >= cfg.confidence_threshold && accepted > 0;
  return {ok, std::to_string(report.steps.size()) + " steps, max ledger gap " + fmt("%.3g", worst) + ", " +
                  std::to_string(warmup_violations) + " warm-up violations, " + std::to_string(accepted) +
                  " accepted pseudo-labels, min accepted confidence " + fmt("%.4f", min_conf)};
}

struct AblationRun {
  double auc_sup = 0, auc_ssl = 0, auc_lstm = 0, hter_sup = 0, hter_ssl = 0, hter_lstm = 0;
};

AblationRun ablation_seed(std::uint64_t seed, Classifier* ssl_out = nullptr) {
  TempDir dir("apexfas_ablation");
  const auto all = default_dataset(dir, seed);
  const auto source = all.filter_domain("domA");
  const auto target = all.filter_domain("domB");
  TrainConfig cfg;
  cfg.seed = seed;

  const auto source_test = source.select(Split::Test);
  auto transfer = [&](TrainMode mode, const Classifier* clf, const LstmHead* head) {
    const auto src = score_videos(mode, clf, head, source_test);
    const auto tgt = score_videos(mode, clf, head, target.entries);
    return evaluate_transfer(to_score_set(src), to_score_set(tgt));
  };

  AblationRun r;
  const auto sup = train_supervised(source, cfg).first;
  const auto e_sup = transfer(TrainMode::Supervised, &sup, nullptr);
  const auto ssl = train_semi_supervised(source, pool_from_manifest(source, cfg), cfg).first;
  const auto e_ssl = transfer(TrainMode::Ssl, &ssl, nullptr);
  const auto head = train_lstm_head(source, ssl, cfg).first;
  const auto e_lstm = transfer(TrainMode::SslLstm, &ssl, &head);
  if (ssl_out) *ssl_out = ssl;
  return {e_sup.target_auc, e_ssl.target_auc, e_lstm.target_auc,
          e_sup.target_hter, e_ssl.target_hter, e_lstm.target_hter};
}

Outcome ablation_ordering() {
  int holds = 0;
  std::ostringstream detail;
  Classifier first;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = ablation_seed(seed, seed == 1 ? &first : nullptr);
    const bool ok = r.auc_ssl >= r.auc_sup - 0.02 && r.auc_ssl >= 0.90;
    holds += ok;
    std::printf("    seed %llu: AUC sup %.4f ssl %.4f ssl+lstm %.4f | HTER sup %.4f ssl %.4f ssl+lstm %.4f %s\n",
                static_cast<unsigned long long>(seed), r.auc_sup, r.auc_ssl, r.auc_lstm, r.hter_sup, r.hter_ssl,
                r.hter_lstm, ok ? "ok" : "miss");
  }
  // Determinism: the same seed reproduces the semi-supervised model bit-exactly.
  TempDir dir("apexfas_determinism");
  const auto source = default_dataset(dir, 1).filter_domain("domA");
  TrainConfig cfg;
  cfg.seed = 1;
  const bool deterministic = train_semi_supervised(source, pool_from_manifest(source, cfg), cfg).first == first;
  detail << holds << "/5 seeds hold; seed 1 rerun " << (deterministic ? "identical" : "DIFFERS");
  return {holds >= 4 && deterministic, detail.str()};
}

Outcome degenerate_equivalences() {
  TempDir dir("apexfas_degenerate");
  SynthConfig synth;
  synth.videos_per_class = 8;
  synth.frames = 40;
  synth.domains.resize(1);
  const auto manifest = generate_dataset(synth, dir.path());
  TrainConfig cfg;
  cfg.max_steps = 400;
  cfg.seed = 13;
  cfg.lambda = 0.0;
  const auto sup = train_supervised(manifest, cfg).first;
  const auto ssl0 = train_semi_supervised(manifest, pool_from_manifest(manifest, cfg), cfg).first;
  const bool same_params = sup == ssl0;

  std::mt19937_64 rng(31);
  std::vector<VideoTensor> videos;
  for (std::size_t n : {3u, 7u, 20u, 49u, 50u}) videos.push_back(apexfas::testing::random_video(rng, n, 6, 6));
  const auto pool = build_unlabeled_pool(videos, {50});
  bool one_each = pool.apexes.size() == videos.size();
  for (std::size_t k = 0; one_each && k < videos.size(); ++k)
    one_each = pool.apexes[k].frame == apex_frame(videos[k]).frame;
  return {same_params && one_each, std::string("lambda=0 vs supervised ") + (same_params ? "identical" : "DIFFER") +
                                       "; T>=N pool " + std::to_string(pool.apexes.size()) + " apexes for " +
                                       std::to_string(videos.size()) + " videos" + (one_each ? ", all equal" : "")};
}

Outcome format_round_trips() {
  TempDir dir("apexfas_roundtrip");
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> small(1, 9);
  std::bernoulli_distribution color(0.5);
  int video_ok = 0, ckpt_ok = 0;
  for (int k = 0; k < 100; ++k) {
    const auto video =
        apexfas::testing::random_video(rng, small(rng), small(rng), small(rng), color(rng) ? 3 : 1, "rt" + std::to_string(k));
    // Fresh names: truncating a non-empty file forces a flush on ext4.
    const auto video_path = dir / ("rt" + std::to_string(k) + ".afv");
    write_video(video, video_path);
    video_ok += read_video(video_path) == video;

    Checkpoint c;
    c.kind = color(rng) ? CheckpointKind::Classifier : CheckpointKind::LstmHead;
    for (std::size_t t = small(rng); t > 0; --t) {
      Matrix m(small(rng), small(rng));
      for (double& v : m.data) v = std::ldexp(std::uniform_real_distribution<double>(-1, 1)(rng), static_cast<int>(small(rng)) * 40 - 200);
      c.tensors.push_back(m);
    }
    const auto ckpt_path = dir / ("rt" + std::to_string(k) + ".afm");
    write_checkpoint(c, ckpt_path);
    const auto back = read_checkpoint(ckpt_path);
    ckpt_ok += back == c && encode_checkpoint(back) == encode_checkpoint(c);
  }
  return {video_ok == 100 && ckpt_ok == 100,
          "AFV1 " + std::to_string(video_ok) + "/100, AFM1 " + std::to_string(ckpt_ok) + "/100 bit-exact"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"weight correctness", 5.0, weight_correctness},
      {"apex convexity and limits", 10.0, apex_convexity_and_limits},
      {"oracle equivalence", 5.0, oracle_equivalence},
      {"gradient checks", 30.0, gradient_checks},
      {"metric oracles", 5.0, metric_oracles},
      {"combined-loss ledger", 60.0, combined_loss_ledger},
      {"ablation ordering", 300.0, ablation_ordering},
      {"degenerate equivalences", 1e9, degenerate_equivalences},
      {"format round-trips", 5.0, format_round_trips},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.time_limit_s;
    const bool pass = o.ok && in_time;
    failed += !pass;
    std::string limit = c.time_limit_s < 1e8 ? " (limit " + fmt("%.0f", c.time_limit_s) + " s)" : "";
    std::printf("[%s] %s: %s; %.2f s%s%s\n", pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(), secs,
                limit.c_str(), in_time ? "" : " TOO SLOW");
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
