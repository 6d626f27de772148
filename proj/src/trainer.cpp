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

#include "apexfas/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

#include "apexfas/apex.hpp"
#include "apexfas/error.hpp"

namespace apexfas {

namespace {

// Independent RNG streams so that, e.g., unlabeled sampling never perturbs
// the labeled batch order.
enum Stream : std::uint64_t { kInitStream = 1, kLabeledStream, kAugmentStream, kUnlabeledStream, kLstmInitStream,
                              kLstmBatchStream };

std::uint64_t stream_seed(std::uint64_t seed, Stream stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(stream) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Epoch-style sampler: reshuffles a permutation whenever it runs dry.
class BatchSampler {
 public:
  BatchSampler(std::size_t n, std::size_t batch, std::uint64_t seed) : rng_(seed), order_(n), batch_(std::min(batch, n)) {
    for (std::size_t k = 0; k < n; ++k) order_[k] = k;
    pos_ = n;
  }

  std::vector<std::size_t> next() {
    std::vector<std::size_t> out;
    out.reserve(batch_);
    while (out.size() < batch_) {
      if (pos_ == order_.size()) {
        std::shuffle(order_.begin(), order_.end(), rng_);
        pos_ = 0;
      }
      out.push_back(order_[pos_++]);
    }
    return out;
  }

 private:
  std::mt19937_64 rng_;
  std::vector<std::size_t> order_;
  std::size_t batch_;
  std::size_t pos_ = 0;
};

FeatureVector standardized_features(const Frame& frame, std::size_t grid, const Standardizer& s) {
  return s.apply(extract_features(frame, grid));
}

bool is_labeled(const ManifestEntry& e) { return e.label == Label::Live || e.label == Label::Spoof; }

struct ValidationResult {
  double accuracy = 0.0;
  double auc = 0.0;
  double loss = 0.0;  // mean cross-entropy
};

ValidationResult validate_classifier(const MlpParams& params, const EvalSet& val) {
  ScoreSet scores;
  std::size_t correct = 0;
  double loss = 0.0;
  for (std::size_t k = 0; k < val.labels.size(); ++k) {
    const auto p = softmax(mlp_forward(params, val.features[k].values));
    loss += cross_entropy(p, val.labels[k]);
    scores.add(p[kLiveClass], val.labels[k] == kLiveClass);
    const int predicted = p[kLiveClass] > p[kSpoofClass] ? kLiveClass : kSpoofClass;
    if (predicted == val.labels[k]) ++correct;
  }
  const double n = static_cast<double>(val.labels.size());
  return {static_cast<double>(correct) / n, auc(scores), loss / n};
}

void require_both_classes(std::span<const int> labels, const std::string& what) {
  const bool has_live = std::find(labels.begin(), labels.end(), kLiveClass) != labels.end();
  const bool has_spoof = std::find(labels.begin(), labels.end(), kSpoofClass) != labels.end();
  if (!has_live || !has_spoof) {
    throw DataError(what + " needs both live and spoof videos");
  }
}

/// Tracks the best validation result and decides when to stop. Higher AUC
/// wins; equal AUC falls back to lower validation loss, so a run whose AUC has
/// saturated still counts sharper separation as progress.
class EarlyStopper {
 public:
  explicit EarlyStopper(std::size_t patience) : patience_(patience) {}

  /// Returns true when (auc, loss) is a new best.
  bool observe(std::size_t step, double auc, double loss) {
    if (auc > best_auc_ || (auc == best_auc_ && loss < best_loss_)) {
      best_auc_ = auc;
      best_loss_ = loss;
      best_step_ = step;
      since_best_ = 0;
      return true;
    }
    ++since_best_;
    return false;
  }

  void reset() {
    best_auc_ = -std::numeric_limits<double>::infinity();
    best_loss_ = std::numeric_limits<double>::infinity();
    since_best_ = 0;
  }

  bool exhausted() const noexcept { return since_best_ >= patience_; }
  std::size_t best_step() const noexcept { return best_step_; }
  double best_auc() const noexcept { return best_auc_; }

 private:
  std::size_t patience_;
  double best_auc_ = -std::numeric_limits<double>::infinity();
  double best_loss_ = std::numeric_limits<double>::infinity();
  std::size_t best_step_ = 0;
  std::size_t since_best_ = 0;
};

std::pair<Classifier, TrainReport> train_classifier(const DatasetManifest& manifest, const UnlabeledPool* pool,
                                                    const TrainConfig& config, double lambda) {
  config.validate();
  const LabeledSet labeled = prepare_labeled_set(manifest, config);
  const EvalSet val = prepare_eval_set(manifest, Split::Val, labeled.standardizer, config);
  require_both_classes(val.labels, "validation split");

  std::vector<FeatureVector> unlabeled;
  if (pool != nullptr) {
    unlabeled.reserve(pool->apexes.size());
    for (const auto& apex : pool->apexes) {
      unlabeled.push_back(standardized_features(apex.frame, config.grid, labeled.standardizer));
    }
    if (unlabeled.empty()) {
      throw DataError("unlabeled pool is empty");
    }
  }

  const std::size_t dim = config.grid * config.grid;
  MlpParams params = MlpParams::init(dim, config.hidden, stream_seed(config.seed, kInitStream));
  AdamState adam = AdamState::for_params(params, config.learning_rate);
  BatchSampler labeled_sampler(labeled.size(), config.batch_size_labeled, stream_seed(config.seed, kLabeledStream));
  std::mt19937_64 augment_rng(stream_seed(config.seed, kAugmentStream));
  std::optional<BatchSampler> unlabeled_sampler;
  if (!unlabeled.empty()) {
    unlabeled_sampler.emplace(unlabeled.size(), config.batch_size_unlabeled,
                              stream_seed(config.seed, kUnlabeledStream));
  }

  // With an active unlabeled loss, early stopping waits for the warm-up to
  // end and the best-model record restarts once the combined loss kicks in.
  const bool uses_unlabeled = pool != nullptr && lambda > 0.0;

  TrainReport report;
  report.lambda = lambda;
  EarlyStopper stopper(config.early_stop_patience);
  MlpParams best = params;
  bool restarted = false;
  report.stop_reason = "max_steps";
  report.stop_step = config.max_steps;

  std::vector<FeatureVector> batch_x;
  std::vector<int> batch_y;
  std::vector<FeatureVector> batch_u;
  for (std::size_t step = 1; step <= config.max_steps; ++step) {
    batch_x.clear();
    batch_y.clear();
    for (std::size_t idx : labeled_sampler.next()) {
      if (config.augmentation.enabled) {
        batch_x.push_back(standardized_features(augment(labeled.apexes[idx], config.augmentation, augment_rng),
                                                config.grid, labeled.standardizer));
      } else {
        batch_x.push_back(labeled.features[idx]);
      }
      batch_y.push_back(labeled.labels[idx]);
    }
    batch_u.clear();
    if (unlabeled_sampler && step > config.warmup_steps) {
      for (std::size_t idx : unlabeled_sampler->next()) batch_u.push_back(unlabeled[idx]);
    }

    StepLog log = ssl_step(params, adam, batch_x, batch_y, batch_u, lambda, config.confidence_threshold);
    log.step = step;

    bool stop = false;
    if (step % config.validation_frequency == 0) {
      const auto v = validate_classifier(params, val);
      log.val_auc = v.auc;
      report.validations.push_back({step, v.accuracy, v.auc});
      const bool combined_phase = uses_unlabeled && step > config.warmup_steps;
      if (combined_phase && !restarted) {
        stopper.reset();
        restarted = true;
      }
      if (stopper.observe(step, v.auc, v.loss)) {
        best = params;
      }
      const bool may_stop = !uses_unlabeled || combined_phase;
      stop = may_stop && stopper.exhausted();
    }
    report.steps.push_back(log);
    if (stop) {
      report.stop_reason = "early_stop";
      report.stop_step = step;
      break;
    }
  }
  if (!report.validations.empty()) {
    params = best;
    report.best_step = stopper.best_step();
    report.best_auc = stopper.best_auc();
  }

  Classifier model;
  model.mlp = std::move(params);
  model.standardizer = labeled.standardizer;
  model.grid = config.grid;
  model.sigma = config.sigma;
  return {std::move(model), std::move(report)};
}

std::vector<FeatureVector> sequence_for(const VideoTensor& video, std::size_t t, double sigma, std::size_t grid,
                                        const Standardizer& standardizer) {
  std::vector<FeatureVector> seq;
  for (const auto& seg : split_segments(video, t)) {
    seq.push_back(standardized_features(segment_apex(seg, sigma).frame, grid, standardizer));
  }
  return seq;
}

ValidationResult validate_lstm(const LstmParams& params, const SequenceSet& val) {
  ScoreSet scores;
  std::size_t correct = 0;
  double loss = 0.0;
  for (std::size_t k = 0; k < val.labels.size(); ++k) {
    const auto p = softmax(lstm_forward(params, val.sequences[k]));
    scores.add(p[kLiveClass], val.labels[k] == kLiveClass);
    loss += cross_entropy(p, val.labels[k]);
    const int predicted = p[kLiveClass] > p[kSpoofClass] ? kLiveClass : kSpoofClass;
    if (predicted == val.labels[k]) ++correct;
  }
  const double n = static_cast<double>(val.labels.size());
  return {static_cast<double>(correct) / n, auc(scores), loss / n};
}

}  // namespace

std::string_view to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::Supervised:
      return "supervised";
    case TrainMode::Ssl:
      return "ssl";
    case TrainMode::SslLstm:
      return "ssl+lstm";
  }
  return "?";
}

TrainMode parse_train_mode(std::string_view token) {
  if (token == "supervised") return TrainMode::Supervised;
  if (token == "ssl") return TrainMode::Ssl;
  if (token == "ssl+lstm") return TrainMode::SslLstm;
  throw UsageError("unknown mode '" + std::string(token) + "' (expected supervised, ssl or ssl+lstm)");
}

void TrainConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw UsageError("lambda must be >= 0");
  if (!(confidence_threshold > 0.0 && confidence_threshold <= 1.0)) {
    throw UsageError("confidence threshold must lie in (0, 1]");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw UsageError("sigma must be > 0");
  if (temporal_lengths.empty()) throw UsageError("at least one temporal length is required");
  for (std::size_t t : temporal_lengths) {
    if (t == 0) throw UsageError("temporal lengths must be >= 1");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw UsageError("learning rate must be > 0");
  if (validation_frequency == 0) throw UsageError("validation frequency must be >= 1");
  if (early_stop_patience == 0) throw UsageError("early-stop patience must be >= 1");
  if (batch_size_labeled == 0 || batch_size_unlabeled == 0) throw UsageError("batch sizes must be >= 1");
  if (max_steps == 0) throw UsageError("max_steps must be >= 1");
  if (grid == 0) throw UsageError("feature grid must be >= 1");
  if (hidden == 0) throw UsageError("hidden width must be >= 1");
  if (augmentation.max_rotation_deg < 0.0 || augmentation.max_translation_px < 0) {
    throw UsageError("augmentation bounds must be non-negative");
  }
}

void write_train_config(const TrainConfig& c, std::ostream& out) {
  out << "lambda=" << c.lambda << '\n'
      << "confidence_threshold=" << c.confidence_threshold << '\n'
      << "sigma=" << c.sigma << '\n'
      << "temporal_lengths=";
  for (std::size_t k = 0; k < c.temporal_lengths.size(); ++k) out << (k ? "," : "") << c.temporal_lengths[k];
  out << '\n'
      << "learning_rate=" << c.learning_rate << '\n'
      << "validation_frequency=" << c.validation_frequency << '\n'
      << "early_stop_patience=" << c.early_stop_patience << '\n'
      << "batch_size_labeled=" << c.batch_size_labeled << '\n'
      << "batch_size_unlabeled=" << c.batch_size_unlabeled << '\n'
      << "max_steps=" << c.max_steps << '\n'
      << "warmup_steps=" << c.warmup_steps << '\n'
      << "grid=" << c.grid << '\n'
      << "hidden=" << c.hidden << '\n'
      << "seed=" << c.seed << '\n'
      << "augment=" << (c.augmentation.enabled ? "true" : "false") << '\n'
      << "max_rotation_deg=" << c.augmentation.max_rotation_deg << '\n'
      << "max_translation_px=" << c.augmentation.max_translation_px << '\n';
}

void write_report_csv(const TrainReport& report, std::ostream& out) {
  out << "step,L_labeled,L_unlabeled,L,accepted_count,val_auc\n";
  out << std::setprecision(17);
  for (const auto& s : report.steps) {
    out << s.step << ',' << s.loss_labeled << ',' << s.loss_unlabeled << ',' << s.loss_total << ',' << s.accepted
        << ',';
    if (s.val_auc) out << *s.val_auc;
    out << '\n';
  }
}

LabeledSet prepare_labeled_set(const DatasetManifest& manifest, const TrainConfig& config) {
  LabeledSet set;
  set.grid = config.grid;
  std::vector<FeatureVector> raw;
  for (const auto& e : manifest.entries) {
    if (e.split != Split::Train || !is_labeled(e)) continue;
    const auto video = read_video(e.video_path);
    auto apex = apex_frame(video, config.sigma);
    raw.push_back(extract_features(apex.frame, config.grid));
    set.ids.push_back(video.id());
    set.apexes.push_back(std::move(apex.frame));
    set.labels.push_back(class_index(e.label));
  }
  if (raw.empty()) {
    throw DataError("manifest has no labeled train entries");
  }
  set.standardizer = Standardizer::fit(raw);
  set.features.reserve(raw.size());
  for (const auto& f : raw) set.features.push_back(set.standardizer.apply(f));
  return set;
}

EvalSet prepare_eval_set(const DatasetManifest& manifest, Split split, const Standardizer& standardizer,
                         const TrainConfig& config) {
  EvalSet set;
  for (const auto& e : manifest.entries) {
    if (e.split != split || !is_labeled(e)) continue;
    const auto video = read_video(e.video_path);
    set.ids.push_back(video.id());
    set.features.push_back(standardized_features(apex_frame(video, config.sigma).frame, config.grid, standardizer));
    set.labels.push_back(class_index(e.label));
  }
  if (set.labels.empty()) {
    throw DataError("manifest has no labeled " + std::string(to_string(split)) + " entries");
  }
  return set;
}

Frame augment(const Frame& frame, double rotation_deg, int dx, int dy) {
  const std::size_t h = frame.height();
  const std::size_t w = frame.width();
  const std::size_t ch = frame.channels();
  const double theta = rotation_deg * std::numbers::pi / 180.0;
  const double cs = std::cos(theta);
  const double sn = std::sin(theta);
  const double cy = 0.5 * (static_cast<double>(h) - 1.0);
  const double cx = 0.5 * (static_cast<double>(w) - 1.0);
  Frame out(h, w, ch);
  const auto hi = static_cast<long long>(h);
  const auto wi = static_cast<long long>(w);
  for (long long r = 0; r < hi; ++r) {
    for (long long c = 0; c < wi; ++c) {
      // Undo the shift, then the rotation, to find the source pixel.
      const double yr = static_cast<double>(r - dy) - cy;
      const double xr = static_cast<double>(c - dx) - cx;
      const auto sr = static_cast<long long>(std::llround(cs * yr - sn * xr + cy));
      const auto sc = static_cast<long long>(std::llround(sn * yr + cs * xr + cx));
      if (sr < 0 || sr >= hi || sc < 0 || sc >= wi) continue;
      for (std::size_t k = 0; k < ch; ++k) {
        out.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c), k) =
            frame.at(static_cast<std::size_t>(sr), static_cast<std::size_t>(sc), k);
      }
    }
  }
  return out;
}

Frame augment(const Frame& frame, const AugmentConfig& config, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-config.max_rotation_deg, config.max_rotation_deg);
  std::uniform_int_distribution<int> shift(-config.max_translation_px, config.max_translation_px);
  const double rotation = angle(rng);
  const int dx = shift(rng);
  const int dy = shift(rng);
  return augment(frame, rotation, dx, dy);
}

PseudoLabel pseudo_label(const Probabilities& probs, double tau, std::size_t index) {
  PseudoLabel out;
  out.index = index;
  out.predicted = probs[kLiveClass] > probs[kSpoofClass] ? kLiveClass : kSpoofClass;
  out.confidence = probs[static_cast<std::size_t>(out.predicted)];
  out.accepted = out.confidence >= tau;
  return out;
}

std::vector<PseudoLabel> pseudo_label_batch(const MlpParams& params, std::span<const FeatureVector> unlabeled,
                                            double tau) {
  std::vector<PseudoLabel> out;
  out.reserve(unlabeled.size());
  for (std::size_t k = 0; k < unlabeled.size(); ++k) {
    out.push_back(pseudo_label(softmax(mlp_forward(params, unlabeled[k].values)), tau, k));
  }
  return out;
}

StepLog ssl_step(MlpParams& params, AdamState& state, std::span<const FeatureVector> labeled,
                 std::span<const int> labels, std::span<const FeatureVector> unlabeled, double lambda, double tau) {
  if (labeled.empty() || labeled.size() != labels.size()) {
    throw UsageError("ssl_step needs a non-empty labeled batch with one label per item");
  }
  StepLog log;
  MlpParams grad = MlpParams::zeros(params.input_dim(), params.hidden_dim());
  const double inv_l = 1.0 / static_cast<double>(labeled.size());
  for (std::size_t k = 0; k < labeled.size(); ++k) {
    const auto g = mlp_gradients(params, labeled[k].values, labels[k]);
    log.loss_labeled += g.loss * inv_l;
    accumulate(grad, g.grad, inv_l);
  }

  // Labels are decided before any update, from the same parameters.
  const auto pseudo = pseudo_label_batch(params, unlabeled, tau);
  log.unlabeled_batch = unlabeled.size();
  for (const auto& p : pseudo) {
    if (p.accepted) {
      ++log.accepted;
      log.min_accepted_confidence = std::min(log.min_accepted_confidence, p.confidence);
    }
  }
  if (log.accepted > 0) {
    const double inv_u = 1.0 / static_cast<double>(log.accepted);
    MlpParams grad_u;
    const bool need_grad = lambda > 0.0;
    if (need_grad) grad_u = MlpParams::zeros(params.input_dim(), params.hidden_dim());
    for (const auto& p : pseudo) {
      if (!p.accepted) continue;
      const auto& x = unlabeled[p.index].values;
      if (need_grad) {
        const auto g = mlp_gradients(params, x, p.predicted);
        log.loss_unlabeled += g.loss * inv_u;
        accumulate(grad_u, g.grad, inv_u);
      } else {
        log.loss_unlabeled += cross_entropy(softmax(mlp_forward(params, x)), p.predicted) * inv_u;
      }
    }
    if (need_grad) accumulate(grad, grad_u, lambda);
  }
  log.loss_total = log.loss_labeled + lambda * log.loss_unlabeled;
  if (!std::isfinite(log.loss_total)) {
    throw NumericError("non-finite training loss (L_labeled=" + std::to_string(log.loss_labeled) +
                       ", L_unlabeled=" + std::to_string(log.loss_unlabeled) + ")");
  }
  adam_step(state, params, grad);
  return log;
}

UnlabeledPool pool_from_manifest(const DatasetManifest& manifest, const TrainConfig& config) {
  std::vector<VideoTensor> videos;
  for (const auto& e : manifest.entries) {
    if (e.split == Split::Train) videos.push_back(read_video(e.video_path));
  }
  if (videos.empty()) {
    throw DataError("manifest has no train entries to build an unlabeled pool from");
  }
  return build_unlabeled_pool(videos, config.temporal_lengths, config.sigma);
}

std::pair<Classifier, TrainReport> train_supervised(const DatasetManifest& manifest, const TrainConfig& config) {
  return train_classifier(manifest, nullptr, config, 0.0);
}

std::pair<Classifier, TrainReport> train_semi_supervised(const DatasetManifest& manifest, const UnlabeledPool& pool,
                                                         const TrainConfig& config) {
  return train_classifier(manifest, &pool, config, config.lambda);
}

SequenceSet prepare_sequences(const DatasetManifest& manifest, Split split, const Standardizer& standardizer,
                              const TrainConfig& config, std::vector<std::string>* warnings) {
  SequenceSet set;
  const std::size_t t = config.temporal_lengths.front();
  for (const auto& e : manifest.entries) {
    if (e.split != split || !is_labeled(e)) continue;
    const auto video = read_video(e.video_path);
    auto seq = sequence_for(video, t, config.sigma, config.grid, standardizer);
    if (seq.empty()) {
      if (warnings) {
        warnings->push_back("skipping '" + video.id() + "': " + std::to_string(video.num_frames()) +
                            " frames yield no segment at T=" + std::to_string(t));
      }
      continue;
    }
    set.ids.push_back(video.id());
    set.sequences.push_back(std::move(seq));
    set.labels.push_back(class_index(e.label));
  }
  return set;
}

std::pair<LstmHead, TrainReport> train_lstm_head(const DatasetManifest& manifest, const Classifier& classifier,
                                                 const TrainConfig& config) {
  config.validate();
  if (classifier.grid != config.grid) {
    throw UsageError("classifier feature grid does not match the training config");
  }
  TrainReport report;
  const auto train = prepare_sequences(manifest, Split::Train, classifier.standardizer, config, &report.warnings);
  const auto val = prepare_sequences(manifest, Split::Val, classifier.standardizer, config, &report.warnings);
  if (train.labels.empty()) {
    throw DataError("every labeled train video is too short for an LSTM sequence");
  }
  require_both_classes(val.labels, "LSTM validation split");

  const std::size_t dim = config.grid * config.grid;
  LstmParams params = LstmParams::init(dim, config.hidden, stream_seed(config.seed, kLstmInitStream));
  AdamState adam = AdamState::for_params(params, config.learning_rate);
  BatchSampler sampler(train.labels.size(), config.batch_size_labeled, stream_seed(config.seed, kLstmBatchStream));
  EarlyStopper stopper(config.early_stop_patience);
  LstmParams best = params;
  report.stop_reason = "max_steps";
  report.stop_step = config.max_steps;

  for (std::size_t step = 1; step <= config.max_steps; ++step) {
    const auto batch = sampler.next();
    const double inv = 1.0 / static_cast<double>(batch.size());
    LstmParams grad = LstmParams::zeros(dim, config.hidden);
    StepLog log;
    log.step = step;
    for (std::size_t idx : batch) {
      const auto g = lstm_gradients(params, train.sequences[idx], train.labels[idx]);
      log.loss_labeled += g.loss * inv;
      accumulate(grad, g.grad, inv);
    }
    log.loss_total = log.loss_labeled;
    if (!std::isfinite(log.loss_total)) {
      throw NumericError("non-finite LSTM training loss");
    }
    adam_step(adam, params, grad);

    bool stop = false;
    if (step % config.validation_frequency == 0) {
      const auto v = validate_lstm(params, val);
      log.val_auc = v.auc;
      report.validations.push_back({step, v.accuracy, v.auc});
      if (stopper.observe(step, v.auc, v.loss)) best = params;
      stop = stopper.exhausted();
    }
    report.steps.push_back(log);
    if (stop) {
      report.stop_reason = "early_stop";
      report.stop_step = step;
      break;
    }
  }
  if (!report.validations.empty()) {
    params = best;
    report.best_step = stopper.best_step();
    report.best_auc = stopper.best_auc();
  }

  LstmHead head;
  head.lstm = std::move(params);
  head.standardizer = classifier.standardizer;
  head.grid = config.grid;
  head.sigma = config.sigma;
  head.segment_length = config.temporal_lengths.front();
  return {std::move(head), std::move(report)};
}

std::vector<VideoScore> score_videos(TrainMode mode, const Classifier* classifier, const LstmHead* lstm,
                                     std::span<const ManifestEntry> entries) {
  if (mode == TrainMode::SslLstm ? lstm == nullptr : classifier == nullptr) {
    throw UsageError("no trained model supplied for mode " + std::string(to_string(mode)));
  }
  std::vector<VideoScore> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    const auto video = read_video(e.video_path);
    Probabilities p{};
    if (mode == TrainMode::SslLstm) {
      auto seq = sequence_for(video, lstm->segment_length, lstm->sigma, lstm->grid, lstm->standardizer);
      if (seq.empty()) {
        seq.push_back(standardized_features(apex_frame(video, lstm->sigma).frame, lstm->grid, lstm->standardizer));
      }
      p = softmax(lstm_forward(lstm->lstm, seq));
    } else {
      const auto x = standardized_features(apex_frame(video, classifier->sigma).frame, classifier->grid,
                                           classifier->standardizer);
      p = softmax(mlp_forward(classifier->mlp, x.values));
    }
    out.push_back({video.id(), e.label, p[kLiveClass]});
  }
  return out;
}

ScoreSet to_score_set(std::span<const VideoScore> scores) {
  ScoreSet set;
  for (const auto& s : scores) {
    if (s.label == Label::Unlabeled) continue;
    set.add(s.live_probability, s.label == Label::Live);
  }
  return set;
}

}  // namespace apexfas
