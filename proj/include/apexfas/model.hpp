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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "apexfas/error.hpp"
#include "apexfas/tensor_io.hpp"

namespace apexfas {

inline constexpr std::size_t kDefaultGrid = 16;
inline constexpr std::size_t kDefaultHidden = 100;
inline constexpr double kDefaultLearningRate = 1e-4;

/// Class 0 is spoof, class 1 is live.
inline constexpr int kSpoofClass = 0;
inline constexpr int kLiveClass = 1;
int class_index(Label label);

using Logits = std::array<double, 2>;
using Probabilities = std::array<double, 2>;

/// Dense row-major matrix of doubles. Bias vectors are n x 1 matrices.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::size_t size() const noexcept { return data.size(); }
  bool same_shape(const Matrix& o) const noexcept { return rows == o.rows && cols == o.cols; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

struct FeatureVector {
  std::vector<double> values;
  bool standardized = false;

  std::size_t dim() const noexcept { return values.size(); }
};

/// Grayscale (channel mean) average-pooled onto a grid x grid lattice, rows and
/// columns partitioned as evenly as possible, flattened row-major.
FeatureVector extract_features(const Frame& frame, std::size_t grid = kDefaultGrid);

/// Per-dimension zero-mean / unit-variance transform fitted on one feature set.
/// Constant dimensions get a unit divisor.
class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(std::vector<double> mean, std::vector<double> scale);

  static Standardizer fit(std::span<const FeatureVector> features);

  FeatureVector apply(const FeatureVector& raw) const;
  const std::vector<double>& mean() const noexcept { return mean_; }
  const std::vector<double>& scale() const noexcept { return scale_; }
  std::size_t dim() const noexcept { return mean_.size(); }

  friend bool operator==(const Standardizer&, const Standardizer&) = default;

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;
};

/// One-hidden-layer ReLU classifier: logits = W2^T relu(W1^T x + b1) + b2.
struct MlpParams {
  Matrix w1;  // D x H
  Matrix b1;  // H x 1
  Matrix w2;  // H x 2
  Matrix b2;  // 2 x 1

  static MlpParams zeros(std::size_t input_dim, std::size_t hidden);
  /// Uniform in [-s, s], s = sqrt(6 / (fan_in + fan_out)); biases zero.
  static MlpParams init(std::size_t input_dim, std::size_t hidden, std::uint64_t seed);

  std::size_t input_dim() const noexcept { return w1.rows; }
  std::size_t hidden_dim() const noexcept { return w1.cols; }
  std::vector<Matrix*> tensors() { return {&w1, &b1, &w2, &b2}; }
  std::vector<const Matrix*> tensors() const { return {&w1, &b1, &w2, &b2}; }

  friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

/// LSTM sequence head. Gate matrices are H x (D + H) acting on [x_t; h_{t-1}];
/// the readout maps h_T to two logits.
struct LstmParams {
  Matrix wi, wf, wo, wg;  // H x (D + H)
  Matrix bi, bf, bo, bg;  // H x 1
  Matrix wr;              // H x 2
  Matrix br;              // 2 x 1

  static LstmParams zeros(std::size_t input_dim, std::size_t hidden);
  static LstmParams init(std::size_t input_dim, std::size_t hidden, std::uint64_t seed);

  std::size_t hidden_dim() const noexcept { return wi.rows; }
  std::size_t input_dim() const noexcept { return wi.cols - wi.rows; }
  std::vector<Matrix*> tensors() { return {&wi, &wf, &wo, &wg, &bi, &bf, &bo, &bg, &wr, &br}; }
  std::vector<const Matrix*> tensors() const { return {&wi, &wf, &wo, &wg, &bi, &bf, &bo, &bg, &wr, &br}; }

  friend bool operator==(const LstmParams&, const LstmParams&) = default;
};

/// Loss, probabilities and parameter-shaped gradient for one example.
template <typename Params>
struct Gradient {
  Params grad;
  double loss = 0.0;
  Probabilities probs{};
};

/// Max-subtracted softmax.
Probabilities softmax(const Logits& logits);
/// -ln(max(p[label], 1e-12)).
double cross_entropy(const Probabilities& probs, int label);

Logits mlp_forward(const MlpParams& params, std::span<const double> x);
Gradient<MlpParams> mlp_gradients(const MlpParams& params, std::span<const double> x, int label);

/// Every intermediate of one LSTM pass; index t holds step t + 1.
struct LstmTrace {
  std::vector<std::vector<double>> input_gate, forget_gate, output_gate, candidate, cell, hidden;
  Logits logits{};
};

LstmTrace lstm_run(const LstmParams& params, std::span<const FeatureVector> sequence);
Logits lstm_forward(const LstmParams& params, std::span<const FeatureVector> sequence);
/// Backpropagation through time of cross_entropy(softmax(lstm_forward)).
Gradient<LstmParams> lstm_gradients(const LstmParams& params, std::span<const FeatureVector> sequence, int label);

/// Bias-corrected Adam with one moment pair per parameter tensor.
struct AdamState {
  double learning_rate = kDefaultLearningRate;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step = 0;
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;

  template <typename Params>
  static AdamState for_params(const Params& params, double learning_rate = kDefaultLearningRate) {
    AdamState s;
    s.learning_rate = learning_rate;
    for (const Matrix* t : params.tensors()) {
      s.first_moment.emplace_back(t->rows, t->cols);
      s.second_moment.emplace_back(t->rows, t->cols);
    }
    return s;
  }
};

/// Rejects non-finite gradients before touching any state.
void adam_step(AdamState& state, std::span<Matrix* const> params, std::span<const Matrix* const> grads);

template <typename Params>
void adam_step(AdamState& state, Params& params, const Params& grads) {
  const auto p = params.tensors();
  const auto g = grads.tensors();
  adam_step(state, std::span<Matrix* const>(p), std::span<const Matrix* const>(g));
}

/// acc += scale * delta, tensor by tensor.
template <typename Params>
void accumulate(Params& acc, const Params& delta, double scale) {
  auto a = acc.tensors();
  const auto d = delta.tensors();
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t i = 0; i < a[k]->size(); ++i) {
      a[k]->data[i] += scale * d[k]->data[i];
    }
  }
}

/// Trained frame classifier plus the feature pipeline it expects.
struct Classifier {
  MlpParams mlp;
  Standardizer standardizer;
  std::size_t grid = kDefaultGrid;
  double sigma = 5.0;

  friend bool operator==(const Classifier&, const Classifier&) = default;
};

/// Trained sequence head over per-segment apex features.
struct LstmHead {
  LstmParams lstm;
  Standardizer standardizer;
  std::size_t grid = kDefaultGrid;
  double sigma = 5.0;
  std::size_t segment_length = 50;

  friend bool operator==(const LstmHead&, const LstmHead&) = default;
};

enum class CheckpointKind : std::uint32_t { Classifier = 1, LstmHead = 2 };

/// AFM1 container: "AFM1", u32 kind, u32 tensor count, (u32 rows, u32 cols)
/// per tensor, then every tensor's entries as little-endian f64.
struct Checkpoint {
  CheckpointKind kind = CheckpointKind::Classifier;
  std::vector<Matrix> tensors;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

std::string encode_checkpoint(const Checkpoint& checkpoint);
Checkpoint decode_checkpoint(const std::string& bytes);
void write_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint read_checkpoint(const std::filesystem::path& path);

Checkpoint to_checkpoint(const Classifier& model);
Checkpoint to_checkpoint(const LstmHead& model);
Classifier classifier_from_checkpoint(const Checkpoint& checkpoint);
LstmHead lstm_head_from_checkpoint(const Checkpoint& checkpoint);

void save_classifier(const Classifier& model, const std::filesystem::path& path);
Classifier load_classifier(const std::filesystem::path& path);
void save_lstm_head(const LstmHead& model, const std::filesystem::path& path);
LstmHead load_lstm_head(const std::filesystem::path& path);

}  // namespace apexfas
