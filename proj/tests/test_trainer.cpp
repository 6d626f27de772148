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
#include <sstream>

#include "apexfas/error.hpp"
#include "apexfas/synth.hpp"
#include "apexfas/trainer.hpp"
#include "test_util.hpp"

using namespace apexfas;
using apexfas::testing::TempDir;

namespace {

/// Small single-domain synthetic set shared by the training tests.
const DatasetManifest& small_dataset() {
  static TempDir dir("apexfas_trainer");
  static const DatasetManifest manifest = [] {
    SynthConfig cfg;
    cfg.videos_per_class = 10;
    cfg.frames = 40;
    cfg.height = cfg.width = 16;
    cfg.domains.resize(1);
    cfg.seed = 3;
    return generate_dataset(cfg, dir.path());
  }();
  return manifest;
}

TrainConfig small_config() {
  TrainConfig c;
  c.grid = 8;
  c.hidden = 12;
  c.temporal_lengths = {10, 16};
  c.learning_rate = 1e-3;
  c.batch_size_labeled = 8;
  c.batch_size_unlabeled = 8;
  c.max_steps = 200;
  c.warmup_steps = 60;
  c.validation_frequency = 10;
  c.early_stop_patience = 3;
  c.seed = 5;
  return c;
}

std::vector<FeatureVector> random_batch(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<FeatureVector> out(n);
  for (auto& f : out)
    for (std::size_t i = 0; i < d; ++i) f.values.push_back(g(rng));
  return out;
}

}  // namespace

TEST_CASE("TrainConfig defaults and validation") {
  TrainConfig c;
  CHECK(c.lambda == 1.5);
  CHECK(c.confidence_threshold == 0.9);
  CHECK(c.sigma == 5.0);
  CHECK(c.temporal_lengths == std::vector<std::size_t>{50, 80});
  CHECK(c.learning_rate == 1e-4);
  CHECK(c.validation_frequency == 30);
  CHECK(c.early_stop_patience == 5);
  CHECK(c.batch_size_labeled == 32);
  CHECK(c.batch_size_unlabeled == 32);
  CHECK(c.max_steps == 3000);
  CHECK(c.warmup_steps == 300);
  CHECK(c.hidden == 100);
  CHECK(c.augmentation.max_rotation_deg == 10.0);
  CHECK(c.augmentation.max_translation_px == 4);
  CHECK_NOTHROW(c.validate());
  for (double tau : {0.0, -0.1, 1.01}) {
    auto bad = c;
    bad.confidence_threshold = tau;
    CHECK_THROWS_AS(bad.validate(), UsageError);
  }
  auto one = c;
  one.confidence_threshold = 1.0;
  CHECK_NOTHROW(one.validate());
  auto neg = c;
  neg.lambda = -0.5;
  CHECK_THROWS_AS(neg.validate(), UsageError);

  CHECK(parse_train_mode("ssl+lstm") == TrainMode::SslLstm);
  CHECK(to_string(TrainMode::Ssl) == "ssl");
  CHECK_THROWS_AS(parse_train_mode("lstm"), UsageError);
}

TEST_CASE("augment") {
  std::mt19937_64 rng(1);
  const auto f = apexfas::testing::random_frame(rng, 5, 6, 1);
  CHECK(augment(f, 0.0, 0, 0) == f);
  const auto gone_x = augment(f, 0.0, 6, 0), gone_y = augment(f, 0.0, 0, -5);
  for (const auto& p : gone_x.pixels()) CHECK(p == 0.0f);
  for (const auto& p : gone_y.pixels()) CHECK(p == 0.0f);

  const Frame small(2, 2, 1, {0.1f, 0.2f, 0.3f, 0.4f});
  CHECK(augment(small, 0.0, 1, 0) == Frame(2, 2, 1, {0.0f, 0.1f, 0.0f, 0.3f}));
  CHECK(augment(small, 0.0, 0, 1) == Frame(2, 2, 1, {0.0f, 0.0f, 0.1f, 0.2f}));

  const Frame odd(3, 3, 1, {0, 0, 0, 1, 0, 0, 0, 0, 0});
  const auto turned = augment(odd, 90.0, 0, 0);
  CHECK(turned.at(1, 1, 0) == 0.0f);
  float total = 0;
  for (float p : turned.pixels()) total += p;
  CHECK(total == 1.0f);
  CHECK(turned.at(1, 0, 0) == 0.0f);

  AugmentConfig cfg;
  cfg.enabled = true;
  for (int k = 0; k < 20; ++k) CHECK(augment(f, cfg, rng).in_unit_range());
}

TEST_CASE("pseudo_label") {
  const auto a = pseudo_label({0.95, 0.05}, 0.9);
  CHECK(a.accepted);
  CHECK(a.predicted == 0);
  CHECK(a.confidence == 0.95);
  CHECK_FALSE(pseudo_label({0.85, 0.15}, 0.9).accepted);
  CHECK(pseudo_label({0.1, 0.9}, 0.9).accepted);
  CHECK(pseudo_label({0.1, 0.9}, 0.9).predicted == kLiveClass);
}

TEST_CASE("pseudo_label_batch follows argmax and the threshold") {
  std::mt19937_64 rng(2);
  auto params = MlpParams::init(6, 5, 3);
  for (double& v : params.w2.data) v *= 8.0;
  const auto batch = random_batch(rng, 64, 6);
  const auto labels = pseudo_label_batch(params, batch, 0.9);
  REQUIRE(labels.size() == 64);
  std::size_t accepted = 0;
  for (std::size_t k = 0; k < 64; ++k) {
    const auto p = softmax(mlp_forward(params, batch[k].values));
    CHECK(labels[k].index == k);
    CHECK(labels[k].predicted == (p[1] > p[0] ? 1 : 0));
    CHECK(labels[k].confidence == std::max(p[0], p[1]));
    CHECK(labels[k].accepted == (labels[k].confidence >= 0.9));
    accepted += labels[k].accepted;
  }
  CHECK(accepted > 0);
  CHECK(accepted < 64);
}

TEST_CASE("ssl_step") {
  std::mt19937_64 rng(3);
  const auto labeled = random_batch(rng, 8, 6);
  const std::vector<int> labels = {0, 1, 0, 1, 1, 0, 0, 1};
  const auto unlabeled = random_batch(rng, 8, 6);
  auto base = MlpParams::init(6, 5, 4);
  for (double& v : base.w2.data) v *= 10.0;

  SUBCASE("lambda 0 equals a purely supervised step") {
    auto p1 = base, p2 = base, p3 = base;
    auto s1 = AdamState::for_params(p1, 1e-3), s2 = s1, s3 = s1;
    const auto log1 = ssl_step(p1, s1, labeled, labels, unlabeled, 0.0, 0.9);
    ssl_step(p2, s2, labeled, labels, {}, 1.5, 0.9);
    CHECK(p1 == p2);
    CHECK(log1.loss_total == log1.loss_labeled);

    auto sum = MlpParams::zeros(6, 5);
    double loss = 0;
    for (std::size_t k = 0; k < 8; ++k) {
      const auto g = mlp_gradients(p3, labeled[k].values, labels[k]);
      accumulate(sum, g.grad, 1.0 / 8.0);
      loss += g.loss / 8.0;
    }
    adam_step(s3, p3, sum);
    CHECK(p1 == p3);
    CHECK(log1.loss_labeled == doctest::Approx(loss).epsilon(1e-14));
  }
  SUBCASE("combined loss ledger and pseudo-label gate") {
    auto p = base;
    auto s = AdamState::for_params(p, 1e-3);
    const auto before = pseudo_label_batch(p, unlabeled, 0.9);
    const auto log = ssl_step(p, s, labeled, labels, unlabeled, 1.5, 0.9);
    std::size_t accepted = 0;
    double unl = 0;
    for (const auto& pl : before) {
      if (!pl.accepted) continue;
      ++accepted;
      unl += -std::log(std::max(pl.confidence, 1e-12));
    }
    REQUIRE(accepted > 0);
    CHECK(log.accepted == accepted);
    CHECK(log.unlabeled_batch == 8);
    CHECK(log.min_accepted_confidence >= 0.9);
    CHECK(log.loss_unlabeled == doctest::Approx(unl / static_cast<double>(accepted)).epsilon(1e-12));
    CHECK(std::abs(log.loss_total - (log.loss_labeled + 1.5 * log.loss_unlabeled)) <= 1e-12);
  }
  SUBCASE("nothing accepted leaves only the labeled loss") {
    auto p = MlpParams::zeros(6, 5);
    auto s = AdamState::for_params(p);
    const auto log = ssl_step(p, s, labeled, labels, unlabeled, 1.5, 0.9);
    CHECK(log.accepted == 0);
    CHECK(log.loss_unlabeled == 0.0);
    CHECK(log.loss_total == log.loss_labeled);
  }
  SUBCASE("non-finite loss is reported") {
    auto p = base;
    p.b2.data[0] = std::nan("");
    auto s = AdamState::for_params(p);
    CHECK_THROWS_AS(ssl_step(p, s, labeled, labels, unlabeled, 1.5, 0.9), NumericError);
  }
  SUBCASE("batch shape errors") {
    auto p = base;
    auto s = AdamState::for_params(p);
    CHECK_THROWS_AS(ssl_step(p, s, {}, {}, unlabeled, 1.5, 0.9), UsageError);
    const std::vector<int> short_labels = {0, 1};
    CHECK_THROWS_AS(ssl_step(p, s, labeled, short_labels, unlabeled, 1.5, 0.9), UsageError);
  }
}

TEST_CASE("prepare_labeled_set standardizes on labeled train statistics") {
  const auto& m = small_dataset();
  const auto cfg = small_config();
  const auto set = prepare_labeled_set(m, cfg);
  CHECK(set.size() == m.select(Split::Train).size());
  const std::size_t d = set.features.front().dim();
  CHECK(d == 64);
  for (std::size_t i = 0; i < d; ++i) {
    double mean = 0, var = 0;
    for (const auto& f : set.features) mean += f.values[i] / static_cast<double>(set.size());
    for (const auto& f : set.features) var += std::pow(f.values[i] - mean, 2) / static_cast<double>(set.size());
    CHECK(std::abs(mean) <= 1e-9);
    if (set.standardizer.scale()[i] != 1.0) CHECK(var == doctest::Approx(1.0).epsilon(1e-6));
  }

  DatasetManifest two;
  for (const auto& e : m.entries) {
    if (e.split == Split::Train && two.entries.size() < 2 &&
        (two.entries.empty() || two.entries[0].label != e.label))
      two.entries.push_back(e);
  }
  CHECK(prepare_labeled_set(two, cfg).size() == 2);

  DatasetManifest none;
  for (const auto& e : m.entries)
    if (e.split != Split::Train) none.entries.push_back(e);
  CHECK_THROWS_AS(prepare_labeled_set(none, cfg), DataError);
}

TEST_CASE("pool_from_manifest uses every train video at each temporal length") {
  const auto& m = small_dataset();
  const auto cfg = small_config();
  const auto pool = pool_from_manifest(m, cfg);
  const std::size_t videos = m.select(Split::Train).size();
  CHECK(pool.apexes.size() == videos * (expected_segment_count(40, 10) + expected_segment_count(40, 16)));
  CHECK(pool.temporal_lengths == cfg.temporal_lengths);
}

TEST_CASE("train_supervised") {
  const auto& m = small_dataset();
  const auto cfg = small_config();
  const auto [model, report] = train_supervised(m, cfg);
  CHECK(report.lambda == 0.0);
  CHECK_FALSE(report.validations.empty());
  bool perfect = false;
  for (const auto& v : report.validations) perfect |= v.accuracy == 1.0;
  CHECK(perfect);
  CHECK(report.best_auc == 1.0);
  for (const auto& s : report.steps) {
    CHECK(s.loss_total == s.loss_labeled);
    CHECK(s.loss_unlabeled == 0.0);
  }
  if (report.stop_reason == "early_stop")
    CHECK(report.stop_step - report.best_step <= cfg.early_stop_patience * cfg.validation_frequency);

  const auto [again, again_report] = train_supervised(m, cfg);
  CHECK(again == model);
  CHECK(again_report.steps.size() == report.steps.size());
  for (std::size_t k = 0; k < report.steps.size(); ++k)
    CHECK(again_report.steps[k].loss_total == report.steps[k].loss_total);

  std::ostringstream csv;
  write_report_csv(report, csv);
  CHECK(csv.str().rfind("step,L_labeled,L_unlabeled,L,accepted_count,val_auc\n", 0) == 0);
}

TEST_CASE("train_semi_supervised") {
  const auto& m = small_dataset();
  auto cfg = small_config();
  const auto pool = pool_from_manifest(m, cfg);

  SUBCASE("ledger, warm-up and gate") {
    const auto [model, report] = train_semi_supervised(m, pool, cfg);
    CHECK(report.lambda == 1.5);
    REQUIRE(report.steps.size() > cfg.warmup_steps);
    for (const auto& s : report.steps) {
      CHECK(std::abs(s.loss_total - (s.loss_labeled + 1.5 * s.loss_unlabeled)) <= 1e-12);
      CHECK(s.accepted <= s.unlabeled_batch);
      CHECK(s.unlabeled_batch <= cfg.batch_size_unlabeled);
      if (s.accepted > 0) CHECK(s.min_accepted_confidence >= 0.9);
      if (s.step <= cfg.warmup_steps) {
        CHECK(s.loss_unlabeled == 0.0);
        CHECK(s.unlabeled_batch == 0);
      }
    }
    if (report.stop_reason == "early_stop")
      CHECK(report.stop_step - report.best_step <= cfg.early_stop_patience * cfg.validation_frequency);
  }
  SUBCASE("lambda 0 reproduces supervised parameters") {
    cfg.lambda = 0.0;
    CHECK(train_semi_supervised(m, pool, cfg).first == train_supervised(m, cfg).first);
  }
  SUBCASE("accepted fraction rises when the pool is the labeled data") {
    cfg.warmup_steps = 1;
    cfg.max_steps = 400;
    cfg.early_stop_patience = 1000;
    UnlabeledPool same;
    for (const auto& e : m.select(Split::Train)) same.apexes.push_back(apex_frame(read_video(e.video_path)));
    const auto report = train_semi_supervised(m, same, cfg).second;
    double early = 0, late = 0;
    REQUIRE(report.steps.size() == 400);
    for (std::size_t k = 1; k <= 50; ++k) early += static_cast<double>(report.steps[k].accepted);
    for (std::size_t k = 350; k < 400; ++k)
      late += static_cast<double>(report.steps[k].accepted);
    CHECK(late > early);
  }
  SUBCASE("empty pool") {
    CHECK_THROWS_AS(train_semi_supervised(m, UnlabeledPool{}, cfg), DataError);
  }
}

TEST_CASE("LSTM head") {
  const auto& m = small_dataset();
  auto cfg = small_config();
  const auto clf = train_supervised(m, cfg).first;

  SUBCASE("sequences follow the first temporal length") {
    const auto seqs = prepare_sequences(m, Split::Train, clf.standardizer, cfg);
    for (const auto& s : seqs.sequences) CHECK(s.size() == expected_segment_count(40, 10));
  }
  SUBCASE("too-short videos are skipped with a warning") {
    TempDir dir;
    write_video(VideoTensor("tiny", {Frame(16, 16, 1), Frame(16, 16, 1)}), dir / "tiny.afv");
    auto with_short = m;
    with_short.entries.push_back({dir / "tiny.afv", Label::Live, Split::Train, "domA"});
    std::vector<std::string> warnings;
    const auto seqs = prepare_sequences(with_short, Split::Train, clf.standardizer, cfg, &warnings);
    CHECK(seqs.sequences.size() == m.select(Split::Train).size());
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("tiny") != std::string::npos);
  }
  SUBCASE("training writes a usable head and scoring is deterministic") {
    cfg.max_steps = 60;
    const auto [head, report] = train_lstm_head(m, clf, cfg);
    CHECK(head.segment_length == 10);
    CHECK(head.lstm.hidden_dim() == cfg.hidden);
    const auto test = m.select(Split::Test);
    const auto a = score_videos(TrainMode::SslLstm, &clf, &head, test);
    const auto b = score_videos(TrainMode::SslLstm, &clf, &head, test);
    REQUIRE(a.size() == test.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].live_probability == b[k].live_probability);
      CHECK(a[k].live_probability >= 0.0);
      CHECK(a[k].live_probability <= 1.0);
    }
  }
}

TEST_CASE("LSTM beats the apex classifier on temporally drifting classes") {
  // The centered apex cancels a linear brightness ramp, so only the segment
  // sequence carries the class.
  TempDir dir;
  SynthConfig synth;
  synth.videos_per_class = 12;
  synth.frames = 60;
  synth.height = synth.width = 16;
  synth.domains = {{"drift", 0.4, 0.02, 4.0}};
  synth.texture_amplitude = 0.0;
  synth.flicker_amplitude = 0.0;
  synth.temporal_drift = 0.15;
  synth.seed = 11;
  const auto m = generate_dataset(synth, dir.path());

  auto cfg = small_config();
  cfg.temporal_lengths = {15};
  cfg.max_steps = 300;
  cfg.early_stop_patience = 10;
  const auto [clf, clf_report] = train_supervised(m, cfg);
  const auto [head, lstm_report] = train_lstm_head(m, clf, cfg);
  MESSAGE("mlp val auc " << clf_report.best_auc << ", lstm val auc " << lstm_report.best_auc);
  CHECK(lstm_report.best_auc >= clf_report.best_auc);
}

TEST_CASE("score_videos") {
  const auto& m = small_dataset();
  auto cfg = small_config();
  cfg.max_steps = 40;
  const auto test = m.select(Split::Test);
  const auto sup = train_supervised(m, cfg).first;
  cfg.lambda = 0.0;
  const auto ssl0 = train_semi_supervised(m, pool_from_manifest(m, cfg), cfg).first;
  const auto a = score_videos(TrainMode::Supervised, &sup, nullptr, test);
  const auto b = score_videos(TrainMode::Ssl, &ssl0, nullptr, test);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].id == b[k].id);
    CHECK(a[k].live_probability == b[k].live_probability);
  }
  const auto set = to_score_set(a);
  CHECK(set.items().size() == test.size());
  CHECK_THROWS_AS(score_videos(TrainMode::Ssl, nullptr, nullptr, test), UsageError);
  CHECK_THROWS_AS(score_videos(TrainMode::SslLstm, &sup, nullptr, test), UsageError);
}
