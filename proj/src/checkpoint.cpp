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

#include <cmath>
#include <string>

#include "apexfas/model.hpp"
#include "binary_io.hpp"

namespace apexfas {

namespace {

constexpr char kMagic[4] = {'A', 'F', 'M', '1'};

Matrix column(const std::vector<double>& v) {
  Matrix m(v.size(), 1);
  m.data = v;
  return m;
}

// Trailing 1 x 3 tensor: grid, sigma, segment length (0 for classifiers).
Matrix meta(std::size_t grid, double sigma, std::size_t segment_length) {
  Matrix m(1, 3);
  m.data = {static_cast<double>(grid), sigma, static_cast<double>(segment_length)};
  return m;
}

void expect_shape(const Matrix& m, std::size_t rows, std::size_t cols, const char* what) {
  if (m.rows != rows || m.cols != cols) {
    throw DataError(std::string("checkpoint tensor '") + what + "' has shape " + std::to_string(m.rows) + "x" +
                    std::to_string(m.cols) + ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Standardizer standardizer_from(const Matrix& mean, const Matrix& scale) {
  if (mean.cols != 1 || !mean.same_shape(scale)) {
    throw DataError("checkpoint standardizer tensors are malformed");
  }
  return Standardizer(mean.data, scale.data);
}

std::size_t meta_count(double v, const char* what) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) {
    throw DataError(std::string("checkpoint meta field '") + what + "' is not a count");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& checkpoint) {
  std::string bytes(kMagic, 4);
  detail::append_le<std::uint32_t>(bytes, static_cast<std::uint32_t>(checkpoint.kind));
  detail::append_le<std::uint32_t>(bytes, static_cast<std::uint32_t>(checkpoint.tensors.size()));
  for (const Matrix& m : checkpoint.tensors) {
    if (m.data.size() != m.rows * m.cols) {
      throw UsageError("checkpoint tensor size does not match its shape");
    }
    detail::append_le<std::uint32_t>(bytes, static_cast<std::uint32_t>(m.rows));
    detail::append_le<std::uint32_t>(bytes, static_cast<std::uint32_t>(m.cols));
  }
  for (const Matrix& m : checkpoint.tensors) {
    for (double v : m.data) detail::append_le<double>(bytes, v);
  }
  return bytes;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  detail::ByteReader reader(bytes);
  if (bytes.size() < 12 || reader.read_bytes(4) != std::string(kMagic, 4)) {
    throw DataError("not an AFM1 checkpoint (bad magic)");
  }
  Checkpoint cp;
  const auto kind = reader.read_le<std::uint32_t>();
  if (kind != static_cast<std::uint32_t>(CheckpointKind::Classifier) &&
      kind != static_cast<std::uint32_t>(CheckpointKind::LstmHead)) {
    throw DataError("unknown checkpoint kind " + std::to_string(kind));
  }
  cp.kind = static_cast<CheckpointKind>(kind);
  const auto count = reader.read_le<std::uint32_t>();
  if (reader.remaining() < std::uint64_t{count} * 8) {
    throw DataError("truncated checkpoint shape table");
  }
  std::uint64_t total = 0;
  for (std::uint32_t k = 0; k < count; ++k) {
    const auto rows = reader.read_le<std::uint32_t>();
    const auto cols = reader.read_le<std::uint32_t>();
    total += std::uint64_t{rows} * cols;
    cp.tensors.emplace_back(Matrix{});
    cp.tensors.back().rows = rows;
    cp.tensors.back().cols = cols;
  }
  if (reader.remaining() != total * 8) {
    throw DataError("checkpoint payload size does not match its shape table");
  }
  for (Matrix& m : cp.tensors) {
    m.data.resize(m.rows * m.cols);
    for (double& v : m.data) v = reader.read_le<double>();
  }
  return cp;
}

void write_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  detail::write_file(path.string(), encode_checkpoint(checkpoint));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(detail::read_file(path.string()));
}

Checkpoint to_checkpoint(const Classifier& model) {
  Checkpoint cp;
  cp.kind = CheckpointKind::Classifier;
  for (const Matrix* t : model.mlp.tensors()) cp.tensors.push_back(*t);
  cp.tensors.push_back(column(model.standardizer.mean()));
  cp.tensors.push_back(column(model.standardizer.scale()));
  cp.tensors.push_back(meta(model.grid, model.sigma, 0));
  return cp;
}

Checkpoint to_checkpoint(const LstmHead& model) {
  Checkpoint cp;
  cp.kind = CheckpointKind::LstmHead;
  for (const Matrix* t : model.lstm.tensors()) cp.tensors.push_back(*t);
  cp.tensors.push_back(column(model.standardizer.mean()));
  cp.tensors.push_back(column(model.standardizer.scale()));
  cp.tensors.push_back(meta(model.grid, model.sigma, model.segment_length));
  return cp;
}

Classifier classifier_from_checkpoint(const Checkpoint& cp) {
  if (cp.kind != CheckpointKind::Classifier || cp.tensors.size() != 7) {
    throw DataError("checkpoint is not a classifier");
  }
  Classifier model;
  const auto& t = cp.tensors;
  const std::size_t d = t[0].rows;
  const std::size_t h = t[0].cols;
  expect_shape(t[1], h, 1, "b1");
  expect_shape(t[2], h, 2, "w2");
  expect_shape(t[3], 2, 1, "b2");
  expect_shape(t[4], d, 1, "mean");
  expect_shape(t[6], 1, 3, "meta");
  model.mlp = {t[0], t[1], t[2], t[3]};
  model.standardizer = standardizer_from(t[4], t[5]);
  model.grid = meta_count(t[6].data[0], "grid");
  model.sigma = t[6].data[1];
  if (model.grid * model.grid != d) {
    throw DataError("checkpoint grid does not match the feature dimension");
  }
  return model;
}

LstmHead lstm_head_from_checkpoint(const Checkpoint& cp) {
  if (cp.kind != CheckpointKind::LstmHead || cp.tensors.size() != 13) {
    throw DataError("checkpoint is not an LSTM head");
  }
  const auto& t = cp.tensors;
  const std::size_t h = t[0].rows;
  if (t[0].cols <= h) {
    throw DataError("LSTM gate matrix is too narrow");
  }
  const std::size_t d = t[0].cols - h;
  const char* names[] = {"wi", "wf", "wo", "wg"};
  for (std::size_t k = 0; k < 4; ++k) expect_shape(t[k], h, d + h, names[k]);
  const char* bias_names[] = {"bi", "bf", "bo", "bg"};
  for (std::size_t k = 0; k < 4; ++k) expect_shape(t[4 + k], h, 1, bias_names[k]);
  expect_shape(t[8], h, 2, "wr");
  expect_shape(t[9], 2, 1, "br");
  expect_shape(t[10], d, 1, "mean");
  expect_shape(t[12], 1, 3, "meta");
  LstmHead model;
  model.lstm = {t[0], t[1], t[2], t[3], t[4], t[5], t[6], t[7], t[8], t[9]};
  model.standardizer = standardizer_from(t[10], t[11]);
  model.grid = meta_count(t[12].data[0], "grid");
  model.sigma = t[12].data[1];
  model.segment_length = meta_count(t[12].data[2], "segment_length");
  if (model.grid * model.grid != d) {
    throw DataError("checkpoint grid does not match the feature dimension");
  }
  return model;
}

void save_classifier(const Classifier& model, const std::filesystem::path& path) {
  write_checkpoint(to_checkpoint(model), path);
}

Classifier load_classifier(const std::filesystem::path& path) {
  return classifier_from_checkpoint(read_checkpoint(path));
}

void save_lstm_head(const LstmHead& model, const std::filesystem::path& path) {
  write_checkpoint(to_checkpoint(model), path);
}

LstmHead load_lstm_head(const std::filesystem::path& path) {
  return lstm_head_from_checkpoint(read_checkpoint(path));
}

}  // namespace apexfas
