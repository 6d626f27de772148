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

#include "apexfas/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace apexfas {

namespace {

double sigmoid(double a) {
  if (a >= 0.0) {
    return 1.0 / (1.0 + std::exp(-a));
  }
  const double e = std::exp(a);
  return e / (1.0 + e);
}

void fill_uniform(Matrix& m, std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
  const double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-s, s);
  for (double& v : m.data) {
    v = dist(rng);
  }
}

void check_label(int label) {
  if (label != kSpoofClass && label != kLiveClass) {
    throw UsageError("class label must be 0 or 1, got " + std::to_string(label));
  }
}

}  // namespace

int class_index(Label label) {
  switch (label) {
    case Label::Live:
      return kLiveClass;
    case Label::Spoof:
      return kSpoofClass;
    case Label::Unlabeled:
      break;
  }
  throw UsageError("unlabeled entries have no class index");
}

FeatureVector extract_features(const Frame& frame, std::size_t grid) {
  const std::size_t h = frame.height();
  const std::size_t w = frame.width();
  if (grid == 0 || grid > std::min(h, w)) {
    throw UsageError("feature grid must be in [1, min(height, width)], got " + std::to_string(grid));
  }
  const std::size_t ch = frame.channels();
  FeatureVector out;
  out.values.resize(grid * grid);
  for (std::size_t gr = 0; gr < grid; ++gr) {
    const std::size_t r0 = gr * h / grid;
    const std::size_t r1 = (gr + 1) * h / grid;
    for (std::size_t gc = 0; gc < grid; ++gc) {
      const std::size_t c0 = gc * w / grid;
      const std::size_t c1 = (gc + 1) * w / grid;
      double sum = 0.0;
      for (std::size_t r = r0; r < r1; ++r) {
        for (std::size_t c = c0; c < c1; ++c) {
          for (std::size_t k = 0; k < ch; ++k) {
            sum += frame.at(r, c, k);
          }
        }
      }
      out.values[gr * grid + gc] = sum / static_cast<double>((r1 - r0) * (c1 - c0) * ch);
    }
  }
  return out;
}

Standardizer::Standardizer(std::vector<double> mean, std::vector<double> scale)
    : mean_(std::move(mean)), scale_(std::move(scale)) {
  if (mean_.size() != scale_.size()) {
    throw UsageError("standardizer mean/scale size mismatch");
  }
  for (double s : scale_) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw NumericError("standardizer scale must be positive and finite");
    }
  }
}

Standardizer Standardizer::fit(std::span<const FeatureVector> features) {
  if (features.empty()) {
    throw DataError("cannot fit a standardizer on an empty feature set");
  }
  const std::size_t d = features.front().dim();
  std::vector<double> mean(d, 0.0);
  std::vector<double> scale(d, 0.0);
  for (const auto& f : features) {
    if (f.dim() != d) {
      throw DataError("feature dimension mismatch while fitting standardizer");
    }
    for (std::size_t k = 0; k < d; ++k) mean[k] += f.values[k];
  }
  const double n = static_cast<double>(features.size());
  for (double& m : mean) m /= n;
  for (const auto& f : features) {
    for (std::size_t k = 0; k < d; ++k) {
      const double diff = f.values[k] - mean[k];
      scale[k] += diff * diff;
    }
  }
  for (double& s : scale) {
    s = std::sqrt(s / n);
    // Spread at rounding-noise level counts as constant.
    if (!(s > 1e-12)) s = 1.0;
  }
  return Standardizer(std::move(mean), std::move(scale));
}

FeatureVector Standardizer::apply(const FeatureVector& raw) const {
  if (raw.dim() != mean_.size()) {
    throw DataError("feature dimension " + std::to_string(raw.dim()) + " does not match standardizer dimension " +
                    std::to_string(mean_.size()));
  }
  FeatureVector out;
  out.standardized = true;
  out.values.resize(raw.dim());
  for (std::size_t k = 0; k < raw.dim(); ++k) {
    out.values[k] = (raw.values[k] - mean_[k]) / scale_[k];
  }
  return out;
}

MlpParams MlpParams::zeros(std::size_t input_dim, std::size_t hidden) {
  if (input_dim == 0 || hidden == 0) {
    throw UsageError("MLP dimensions must be positive");
  }
  return {Matrix(input_dim, hidden), Matrix(hidden, 1), Matrix(hidden, 2), Matrix(2, 1)};
}

MlpParams MlpParams::init(std::size_t input_dim, std::size_t hidden, std::uint64_t seed) {
  MlpParams p = zeros(input_dim, hidden);
  std::mt19937_64 rng(seed);
  fill_uniform(p.w1, input_dim, hidden, rng);
  fill_uniform(p.w2, hidden, 2, rng);
  return p;
}

LstmParams LstmParams::zeros(std::size_t input_dim, std::size_t hidden) {
  if (input_dim == 0 || hidden == 0) {
    throw UsageError("LSTM dimensions must be positive");
  }
  const std::size_t u = input_dim + hidden;
  return {Matrix(hidden, u),    Matrix(hidden, u),    Matrix(hidden, u),    Matrix(hidden, u),
          Matrix(hidden, 1),    Matrix(hidden, 1),    Matrix(hidden, 1),    Matrix(hidden, 1),
          Matrix(hidden, 2),    Matrix(2, 1)};
}

LstmParams LstmParams::init(std::size_t input_dim, std::size_t hidden, std::uint64_t seed) {
  LstmParams p = zeros(input_dim, hidden);
  std::mt19937_64 rng(seed);
  for (Matrix* gate : {&p.wi, &p.wf, &p.wo, &p.wg}) {
    fill_uniform(*gate, input_dim + hidden, hidden, rng);
  }
  fill_uniform(p.wr, hidden, 2, rng);
  return p;
}

Probabilities softmax(const Logits& logits) {
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m);
  const double e1 = std::exp(logits[1] - m);
  const double z = e0 + e1;
  return {e0 / z, e1 / z};
}

double cross_entropy(const Probabilities& probs, int label) {
  check_label(label);
  return -std::log(std::max(probs[static_cast<std::size_t>(label)], 1e-12));
}

namespace {

struct MlpActivations {
  std::vector<double> pre;     // W1^T x + b1
  std::vector<double> hidden;  // relu(pre)
  Logits logits{};
};

MlpActivations mlp_activations(const MlpParams& p, std::span<const double> x) {
  const std::size_t d = p.input_dim();
  const std::size_t h = p.hidden_dim();
  if (x.size() != d) {
    throw UsageError("MLP input dimension " + std::to_string(x.size()) + " != " + std::to_string(d));
  }
  MlpActivations a;
  a.pre.assign(p.b1.data.begin(), p.b1.data.end());
  for (std::size_t i = 0; i < d; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* row = &p.w1.data[i * h];
    for (std::size_t j = 0; j < h; ++j) a.pre[j] += row[j] * xi;
  }
  a.hidden.resize(h);
  for (std::size_t j = 0; j < h; ++j) a.hidden[j] = a.pre[j] > 0.0 ? a.pre[j] : 0.0;
  a.logits = {p.b2.data[0], p.b2.data[1]};
  for (std::size_t j = 0; j < h; ++j) {
    a.logits[0] += p.w2(j, 0) * a.hidden[j];
    a.logits[1] += p.w2(j, 1) * a.hidden[j];
  }
  return a;
}

}  // namespace

Logits mlp_forward(const MlpParams& params, std::span<const double> x) {
  return mlp_activations(params, x).logits;
}

Gradient<MlpParams> mlp_gradients(const MlpParams& params, std::span<const double> x, int label) {
  check_label(label);
  const auto a = mlp_activations(params, x);
  const std::size_t d = params.input_dim();
  const std::size_t h = params.hidden_dim();

  Gradient<MlpParams> out;
  out.probs = softmax(a.logits);
  out.loss = cross_entropy(out.probs, label);
  out.grad = MlpParams::zeros(d, h);
  auto& g = out.grad;

  // d loss / d logits = p - onehot(label)
  const double dl0 = out.probs[0] - (label == 0 ? 1.0 : 0.0);
  const double dl1 = out.probs[1] - (label == 1 ? 1.0 : 0.0);
  g.b2.data[0] = dl0;
  g.b2.data[1] = dl1;
  std::vector<double> dpre(h, 0.0);
  for (std::size_t j = 0; j < h; ++j) {
    g.w2(j, 0) = a.hidden[j] * dl0;
    g.w2(j, 1) = a.hidden[j] * dl1;
    if (a.pre[j] > 0.0) {
      dpre[j] = params.w2(j, 0) * dl0 + params.w2(j, 1) * dl1;
    }
  }
  g.b1.data = dpre;
  for (std::size_t i = 0; i < d; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    double* row = &g.w1.data[i * h];
    for (std::size_t j = 0; j < h; ++j) row[j] = xi * dpre[j];
  }
  return out;
}

namespace {

void check_sequence(const LstmParams& p, std::span<const FeatureVector> sequence) {
  if (sequence.empty()) {
    throw UsageError("LSTM input sequence is empty");
  }
  for (const auto& x : sequence) {
    if (x.dim() != p.input_dim()) {
      throw UsageError("LSTM input dimension " + std::to_string(x.dim()) + " != " + std::to_string(p.input_dim()));
    }
  }
}

// out = W u + b for W of shape H x U.
void affine(const Matrix& w, const Matrix& b, const std::vector<double>& u, std::vector<double>& out) {
  const std::size_t rows = w.rows;
  const std::size_t cols = w.cols;
  out.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = &w.data[r * cols];
    double acc = b.data[r];
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * u[c];
    out[r] = acc;
  }
}

std::vector<double> concat_input(const FeatureVector& x, const std::vector<double>& h_prev) {
  std::vector<double> u(x.values);
  u.insert(u.end(), h_prev.begin(), h_prev.end());
  return u;
}

}  // namespace

LstmTrace lstm_run(const LstmParams& params, std::span<const FeatureVector> sequence) {
  check_sequence(params, sequence);
  const std::size_t h = params.hidden_dim();
  LstmTrace tr;
  std::vector<double> h_prev(h, 0.0);
  std::vector<double> c_prev(h, 0.0);
  std::vector<double> ai, af, ao, ag;
  for (const auto& x : sequence) {
    const auto u = concat_input(x, h_prev);
    affine(params.wi, params.bi, u, ai);
    affine(params.wf, params.bf, u, af);
    affine(params.wo, params.bo, u, ao);
    affine(params.wg, params.bg, u, ag);
    std::vector<double> i(h), f(h), o(h), g(h), c(h), hh(h);
    for (std::size_t k = 0; k < h; ++k) {
      i[k] = sigmoid(ai[k]);
      f[k] = sigmoid(af[k]);
      o[k] = sigmoid(ao[k]);
      g[k] = std::tanh(ag[k]);
      c[k] = f[k] * c_prev[k] + i[k] * g[k];
      hh[k] = o[k] * std::tanh(c[k]);
    }
    h_prev = hh;
    c_prev = c;
    tr.input_gate.push_back(std::move(i));
    tr.forget_gate.push_back(std::move(f));
    tr.output_gate.push_back(std::move(o));
    tr.candidate.push_back(std::move(g));
    tr.cell.push_back(std::move(c));
    tr.hidden.push_back(std::move(hh));
  }
  tr.logits = {params.br.data[0], params.br.data[1]};
  for (std::size_t k = 0; k < h; ++k) {
    tr.logits[0] += params.wr(k, 0) * h_prev[k];
    tr.logits[1] += params.wr(k, 1) * h_prev[k];
  }
  return tr;
}

Logits lstm_forward(const LstmParams& params, std::span<const FeatureVector> sequence) {
  return lstm_run(params, sequence).logits;
}

Gradient<LstmParams> lstm_gradients(const LstmParams& params, std::span<const FeatureVector> sequence, int label) {
  check_label(label);
  const auto tr = lstm_run(params, sequence);
  const std::size_t h = params.hidden_dim();
  const std::size_t d = params.input_dim();
  const std::size_t steps = sequence.size();

  Gradient<LstmParams> out;
  out.probs = softmax(tr.logits);
  out.loss = cross_entropy(out.probs, label);
  out.grad = LstmParams::zeros(d, h);
  auto& g = out.grad;

  const double dl0 = out.probs[0] - (label == 0 ? 1.0 : 0.0);
  const double dl1 = out.probs[1] - (label == 1 ? 1.0 : 0.0);
  g.br.data[0] = dl0;
  g.br.data[1] = dl1;
  const auto& h_last = tr.hidden.back();
  std::vector<double> dh(h), dc(h, 0.0);
  for (std::size_t k = 0; k < h; ++k) {
    g.wr(k, 0) = h_last[k] * dl0;
    g.wr(k, 1) = h_last[k] * dl1;
    dh[k] = params.wr(k, 0) * dl0 + params.wr(k, 1) * dl1;
  }

  const std::vector<double> zeros(h, 0.0);
  std::vector<double> dai(h), daf(h), dao(h), dag(h);
  for (std::size_t step = steps; step-- > 0;) {
    const auto& i = tr.input_gate[step];
    const auto& f = tr.forget_gate[step];
    const auto& o = tr.output_gate[step];
    const auto& cand = tr.candidate[step];
    const auto& c = tr.cell[step];
    const auto& c_prev = step > 0 ? tr.cell[step - 1] : zeros;
    const auto& h_prev = step > 0 ? tr.hidden[step - 1] : zeros;
    for (std::size_t k = 0; k < h; ++k) {
      const double tc = std::tanh(c[k]);
      const double d_o = dh[k] * tc;
      dc[k] += dh[k] * o[k] * (1.0 - tc * tc);
      dai[k] = dc[k] * cand[k] * i[k] * (1.0 - i[k]);
      daf[k] = dc[k] * c_prev[k] * f[k] * (1.0 - f[k]);
      dao[k] = d_o * o[k] * (1.0 - o[k]);
      dag[k] = dc[k] * i[k] * (1.0 - cand[k] * cand[k]);
      dc[k] *= f[k];  // carried to step - 1
    }
    const auto u = concat_input(sequence[step], h_prev);
    std::vector<double> du(d + h, 0.0);
    const std::pair<Matrix*, const std::vector<double>*> gates[] = {
        {&g.wi, &dai}, {&g.wf, &daf}, {&g.wo, &dao}, {&g.wg, &dag}};
    const Matrix* weights[] = {&params.wi, &params.wf, &params.wo, &params.wg};
    Matrix* biases[] = {&g.bi, &g.bf, &g.bo, &g.bg};
    for (std::size_t gi = 0; gi < 4; ++gi) {
      Matrix& gw = *gates[gi].first;
      const auto& da = *gates[gi].second;
      const Matrix& w = *weights[gi];
      for (std::size_t r = 0; r < h; ++r) {
        const double dar = da[r];
        biases[gi]->data[r] += dar;
        if (dar == 0.0) continue;
        double* grow = &gw.data[r * (d + h)];
        const double* wrow = &w.data[r * (d + h)];
        for (std::size_t col = 0; col < d + h; ++col) {
          grow[col] += dar * u[col];
          du[col] += dar * wrow[col];
        }
      }
    }
    for (std::size_t k = 0; k < h; ++k) dh[k] = du[d + k];
  }
  return out;
}

void adam_step(AdamState& state, std::span<Matrix* const> params, std::span<const Matrix* const> grads) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size() ||
      params.size() != state.second_moment.size()) {
    throw UsageError("adam_step: tensor count mismatch");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (!params[k]->same_shape(*grads[k]) || !params[k]->same_shape(state.first_moment[k])) {
      throw UsageError("adam_step: tensor shape mismatch");
    }
    for (double v : grads[k]->data) {
      if (!std::isfinite(v)) {
        throw NumericError("adam_step: non-finite gradient");
      }
    }
  }
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = params[k]->data;
    const auto& g = grads[k]->data;
    auto& m = state.first_moment[k].data;
    auto& v = state.second_moment[k].data;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      p[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

}  // namespace apexfas
