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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "apexfas/apex.hpp"
#include "apexfas/error.hpp"
#include "apexfas/metrics.hpp"
#include "apexfas/segmenter.hpp"
#include "apexfas/synth.hpp"
#include "apexfas/tensor_io.hpp"
#include "cli.hpp"

namespace py = pybind11;
using namespace apexfas;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

// Accepts (N, H, W) or (N, H, W, C).
VideoTensor to_video(const FloatArray& a, const std::string& id) {
  if (a.ndim() != 3 && a.ndim() != 4) throw UsageError("video array must have shape (N, H, W) or (N, H, W, C)");
  const auto n = static_cast<std::size_t>(a.shape(0));
  const auto h = static_cast<std::size_t>(a.shape(1));
  const auto w = static_cast<std::size_t>(a.shape(2));
  const std::size_t c = a.ndim() == 4 ? static_cast<std::size_t>(a.shape(3)) : 1;
  const float* data = a.data();
  const std::size_t per = h * w * c;
  std::vector<Frame> frames;
  frames.reserve(n);
  for (std::size_t k = 0; k < n; ++k) frames.emplace_back(h, w, c, std::vector<float>(data + k * per, data + (k + 1) * per));
  return VideoTensor(id, std::move(frames));
}

py::array_t<float> to_array(const Frame& f) {
  py::array_t<float> out({f.height(), f.width(), f.channels()});
  std::copy(f.pixels().begin(), f.pixels().end(), out.mutable_data());
  return out;
}

py::array_t<float> to_array(const VideoTensor& v) {
  const Frame& first = v.frame(1);
  py::array_t<float> out({v.num_frames(), first.height(), first.width(), first.channels()});
  float* dst = out.mutable_data();
  for (const auto& f : v.frames()) dst = std::copy(f.pixels().begin(), f.pixels().end(), dst);
  return out;
}

ScoreSet to_scores(const std::vector<double>& scores, const std::vector<bool>& live) {
  if (scores.size() != live.size()) throw UsageError("scores and labels must have the same length");
  ScoreSet s;
  for (std::size_t k = 0; k < scores.size(); ++k) s.add(scores[k], live[k]);
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gaussian apex frames, pseudo-label training and threshold-transfer metrics";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_IOError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("central_index", &central_index, py::arg("n"));
  m.def(
      "gaussian_weights",
      [](std::size_t n, double center, double sigma, bool normalized) {
        auto w = gaussian_weights(n, center, sigma);
        return normalized ? normalize_weights(w).values : w.values;
      },
      py::arg("n"), py::arg("center"), py::arg("sigma") = kDefaultSigma, py::arg("normalized") = false);

  m.def(
      "apex_frame", [](const FloatArray& video, double sigma) { return to_array(apex_frame(to_video(video, "array"), sigma).frame); },
      py::arg("video"), py::arg("sigma") = kDefaultSigma, "Gaussian-weighted apex of an (N, H, W[, C]) array.");
  m.def(
      "segment_apexes",
      [](const FloatArray& video, std::size_t t, double sigma) {
        const auto v = to_video(video, "array");
        py::list out;
        for (const auto& seg : split_segments(v, t)) out.append(py::make_tuple(seg.start, seg.end, to_array(segment_apex(seg, sigma).frame)));
        return out;
      },
      py::arg("video"), py::arg("t"), py::arg("sigma") = kDefaultSigma,
      "List of (start, end, apex) for each kept segment of length t (1-based, inclusive).");
  m.def("expected_segment_count", &expected_segment_count, py::arg("n"), py::arg("t"));

  m.def(
      "read_video",
      [](const std::filesystem::path& path) {
        const auto v = read_video(path);
        return py::make_tuple(v.id(), to_array(v));
      },
      py::arg("path"), "Returns (id, array of shape (N, H, W, C)).");
  m.def(
      "write_video",
      [](const std::filesystem::path& path, const FloatArray& video) { write_video(to_video(video, path.stem().string()), path); },
      py::arg("path"), py::arg("video"));

  m.def(
      "roc_curve",
      [](const std::vector<double>& scores, const std::vector<bool>& live) {
        std::vector<std::tuple<double, double, double>> out;
        for (const auto& p : roc_curve(to_scores(scores, live)).points) out.emplace_back(p.threshold, p.fpr, p.tpr);
        return out;
      },
      py::arg("scores"), py::arg("live"), "(threshold, fpr, tpr) points; live is the positive class.");
  m.def(
      "auc", [](const std::vector<double>& scores, const std::vector<bool>& live) { return auc(to_scores(scores, live)); },
      py::arg("scores"), py::arg("live"));
  m.def(
      "eer_threshold",
      [](const std::vector<double>& scores, const std::vector<bool>& live) {
        const auto e = eer_threshold(to_scores(scores, live));
        return py::make_tuple(e.threshold, e.eer);
      },
      py::arg("scores"), py::arg("live"), "Returns (threshold, eer).");
  m.def(
      "hter",
      [](const std::vector<double>& scores, const std::vector<bool>& live, double threshold) {
        return hter(to_scores(scores, live), threshold);
      },
      py::arg("scores"), py::arg("live"), py::arg("threshold"));
  m.def(
      "evaluate_transfer",
      [](const std::vector<double>& source_scores, const std::vector<bool>& source_live,
         const std::vector<double>& target_scores, const std::vector<bool>& target_live) {
        const auto r =
            evaluate_transfer(to_scores(source_scores, source_live), to_scores(target_scores, target_live));
        py::dict d;
        d["eer"] = r.source_eer;
        d["threshold"] = r.threshold;
        d["hter"] = r.target_hter;
        d["far"] = r.target_far;
        d["frr"] = r.target_frr;
        d["auc"] = r.target_auc;
        return d;
      },
      py::arg("source_scores"), py::arg("source_live"), py::arg("target_scores"), py::arg("target_live"));

  m.def(
      "generate_dataset",
      [](const std::filesystem::path& out_dir, const std::map<std::string, std::string>& settings) {
        SynthConfig cfg;
        for (const auto& [k, v] : settings) apply_synth_setting(cfg, k, v);
        cfg.validate();
        std::vector<std::tuple<std::string, std::string, std::string, std::string>> rows;
        for (const auto& e : generate_dataset(cfg, out_dir).entries)
          rows.emplace_back(e.video_path.string(), std::string(to_string(e.label)), std::string(to_string(e.split)),
                            e.domain_tag);
        return rows;
      },
      py::arg("out_dir"), py::arg("settings") = std::map<std::string, std::string>{},
      "Writes a synthetic dataset; settings are synth config key=value pairs. Returns manifest rows.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs one apexfas command. Returns (exit_code, stdout, stderr).");
}
