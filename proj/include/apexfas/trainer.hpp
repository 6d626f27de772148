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
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "apexfas/metrics.hpp"
#include "apexfas/model.hpp"
#include "apexfas/segmenter.hpp"
#include "apexfas/tensor_io.hpp"

namespace apexfas {

enum class TrainMode { Supervised, Ssl, SslLstm };
std::string_view to_string(TrainMode mode);
TrainMode parse_train_mode(std::string_view token);

struct AugmentConfig {
  bool enabled = false;
  double max_rotation_deg = 10.0;
  int max_translation_px = 4;
};

struct TrainConfig {
  double lambda = 1.5;
  double confidence_threshold = 0.9;
  double sigma = kDefaultSigma;
  std::vector<std::size_t> temporal_lengths = kDefaultTemporalLengths;
  double learning_rate = kDefaultLearningRate;
  std::size_t validation_frequency = 30;
  std::size_t early_stop_patience = 5;
  std::size_t batch_size_labeled = 32;
  std::size_t batch_size_unlabeled = 32;
  std::size_t max_steps = 3000;
  std::size_t warmup_steps = 300;
  std::size_t grid = kDefaultGrid;
  std::size_t hidden = kDefaultHidden;
  std::uint64_t seed = 0;
  AugmentConfig augmentation;

  void validate() const;
};

void write_train_config(const TrainConfig& config, std::ostream& out);

struct PseudoLabel {
  std::size_t index = 0;  // position in the unlabeled batch
  int predicted = kSpoofClass;
  double confidence = 0.0;
  bool accepted = false;
};

struct StepLog {
  std::size_t step = 0;
  double loss_labeled = 0.0;
  double loss_unlabeled = 0.0;
  double loss_total = 0.0;
  std::size_t unlabeled_batch = 0;
  std::size_t accepted = 0;
  /// Smallest confidence among accepted pseudo-labels; 1 when none accepted.
  double min_accepted_confidence = 1.0;
  std::optional<double> val_auc;
};

struct ValidationLog {
  std::size_t step = 0;
  double accuracy = 0.0;
  double auc = 0.0;
};

struct TrainReport {
  double lambda = 0.0;
  std::vector<StepLog> steps;
  std::vector<ValidationLog> validations;
  std::size_t best_step = 0;
  double best_auc = 0.0;
  std::size_t stop_step = 0;
  std::string stop_reason;
  std::vector<std::string> warnings;
};

/// `step,L_labeled,L_unlabeled,L,accepted_count,val_auc`; val_auc is empty on
/// steps without validation.
void write_report_csv(const TrainReport& report, std::ostream& out);

/// Labeled train-split apexes with features standardized on their own
/// statistics.
struct LabeledSet {
  std::vector<std::string> ids;
  std::vector<Frame> apexes;
  std::vector<FeatureVector> features;
  std::vector<int> labels;
  Standardizer standardizer;
  std::size_t grid = kDefaultGrid;

  std::size_t size() const noexcept { return labels.size(); }
};

struct EvalSet {
  std::vector<std::string> ids;
  std::vector<FeatureVector> features;
  std::vector<int> labels;
};

LabeledSet prepare_labeled_set(const DatasetManifest& manifest, const TrainConfig& config);
/// Apex features of the live/spoof entries of `split`, standardized with `standardizer`.
EvalSet prepare_eval_set(const DatasetManifest& manifest, Split split, const Standardizer& standardizer,
                         const TrainConfig& config);

/// Nearest-neighbour rotation about the frame center, then an integer shift
/// by (dx, dy). Pixels with no source are 0.
Frame augment(const Frame& frame, double rotation_deg, int dx, int dy);
/// Draws rotation and shifts uniformly within the configured bounds.
Frame augment(const Frame& frame, const AugmentConfig& config, std::mt19937_64& rng);

/// Argmax class and its probability; accepted iff confidence >= tau.
PseudoLabel pseudo_label(const Probabilities& probs, double tau, std::size_t index = 0);
std::vector<PseudoLabel> pseudo_label_batch(const MlpParams& params, std::span<const FeatureVector> unlabeled,
                                            double tau);

/// One optimizer step on L = mean CE(labeled) + lambda * mean CE(accepted
/// pseudo-labeled). Pseudo-labels come from the current parameters and act
/// as constant targets.
StepLog ssl_step(MlpParams& params, AdamState& state, std::span<const FeatureVector> labeled,
                 std::span<const int> labels, std::span<const FeatureVector> unlabeled, double lambda, double tau);

/// Train-split videos (any label) condensed at every configured temporal length.
UnlabeledPool pool_from_manifest(const DatasetManifest& manifest, const TrainConfig& config);

std::pair<Classifier, TrainReport> train_supervised(const DatasetManifest& manifest, const TrainConfig& config);
/// Supervised warm-up for config.warmup_steps, then the combined loss.
std::pair<Classifier, TrainReport> train_semi_supervised(const DatasetManifest& manifest, const UnlabeledPool& pool,
                                                         const TrainConfig& config);

struct SequenceSet {
  std::vector<std::string> ids;
  std::vector<std::vector<FeatureVector>> sequences;
  std::vector<int> labels;
};

/// Per-segment apex feature sequences at the first configured temporal
/// length. Videos without a kept segment are skipped and named in `warnings`.
SequenceSet prepare_sequences(const DatasetManifest& manifest, Split split, const Standardizer& standardizer,
                              const TrainConfig& config, std::vector<std::string>* warnings = nullptr);

std::pair<LstmHead, TrainReport> train_lstm_head(const DatasetManifest& manifest, const Classifier& classifier,
                                                 const TrainConfig& config);

struct VideoScore {
  std::string id;
  Label label = Label::Unlabeled;
  double live_probability = 0.0;
};

/// Live-probability per entry: classifier on the whole-video apex, or the LSTM
/// head on the segment-apex sequence (a too-short video falls back to its
/// whole-video apex as a one-step sequence).
std::vector<VideoScore> score_videos(TrainMode mode, const Classifier* classifier, const LstmHead* lstm,
                                     std::span<const ManifestEntry> entries);

/// Labeled scores only.
ScoreSet to_score_set(std::span<const VideoScore> scores);

}  // namespace apexfas
