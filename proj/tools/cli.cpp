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

#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "apexfas/apex.hpp"
#include "apexfas/error.hpp"
#include "apexfas/metrics.hpp"
#include "apexfas/model.hpp"
#include "apexfas/segmenter.hpp"
#include "apexfas/synth.hpp"
#include "apexfas/tensor_io.hpp"
#include "apexfas/trainer.hpp"

namespace apexfas::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw DataError("cannot open " + path.string() + " for writing");
  }
  return out;
}

std::vector<ManifestEntry> select_entries(const DatasetManifest& manifest, const std::string& split,
                                          const std::string& domain) {
  std::vector<ManifestEntry> out;
  std::optional<Split> wanted;
  if (split != "all") wanted = parse_split(split);
  for (const auto& e : manifest.entries) {
    if (wanted && e.split != *wanted) continue;
    if (!domain.empty() && e.domain_tag != domain) continue;
    if (e.label == Label::Unlabeled) continue;
    out.push_back(e);
  }
  if (out.empty()) {
    throw DataError("no labeled entries for split '" + split + "'" + (domain.empty() ? "" : " in domain " + domain));
  }
  return out;
}

ScoreSet read_scores_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open scores file: " + path.string());
  }
  ScoreSet scores;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#' || (line_no == 1 && line.rfind("id,", 0) == 0)) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (fields.size() != 3) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected `id,score,label`");
    }
    char* end = nullptr;
    const double score = std::strtod(fields[1].c_str(), &end);
    if (end == fields[1].c_str() || *end != '\0') {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": bad score '" + fields[1] + "'");
    }
    const Label label = parse_label(fields[2]);
    if (label == Label::Unlabeled) continue;
    scores.add(score, label == Label::Live);
  }
  if (scores.empty()) {
    throw DataError("scores file has no scores: " + path.string());
  }
  return scores;
}

void write_scores_csv(std::span<const VideoScore> scores, std::ostream& out) {
  out << "id,score,label\n" << std::setprecision(17);
  for (const auto& s : scores) out << s.id << ',' << s.live_probability << ',' << to_string(s.label) << '\n';
}

void add_train_flags(CLI::App* cmd, TrainConfig& c, bool& augment) {
  cmd->add_option("--lambda", c.lambda, "weight of the unlabeled loss")->capture_default_str();
  cmd->add_option("--tau", c.confidence_threshold, "pseudo-label confidence threshold")->capture_default_str();
  cmd->add_option("--sigma", c.sigma, "Gaussian standard deviation in frames")->capture_default_str();
  cmd->add_option("--t", c.temporal_lengths, "unlabeled-pool temporal lengths (comma separated)")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--lr", c.learning_rate, "Adam learning rate")->capture_default_str();
  cmd->add_option("--val-freq", c.validation_frequency, "validate every N steps")->capture_default_str();
  cmd->add_option("--patience", c.early_stop_patience, "validations without improvement before stopping")
      ->capture_default_str();
  cmd->add_option("--batch-labeled", c.batch_size_labeled, "labeled batch size")->capture_default_str();
  cmd->add_option("--batch-unlabeled", c.batch_size_unlabeled, "unlabeled batch size")->capture_default_str();
  cmd->add_option("--max-steps", c.max_steps, "step budget per stage")->capture_default_str();
  cmd->add_option("--warmup", c.warmup_steps, "supervised-only steps before the unlabeled loss")->capture_default_str();
  cmd->add_option("--grid", c.grid, "feature pooling grid (D = grid^2)")->capture_default_str();
  cmd->add_option("--hidden", c.hidden, "hidden width of the MLP and LSTM")->capture_default_str();
  cmd->add_option("--seed", c.seed, "seed for every random stream")->capture_default_str();
  cmd->add_flag("--augment", augment, "enable rotation/translation augmentation (off by default)");
  cmd->add_option("--max-rotation", c.augmentation.max_rotation_deg, "augmentation rotation bound in degrees")
      ->capture_default_str();
  cmd->add_option("--max-translation", c.augmentation.max_translation_px, "augmentation shift bound in pixels")
      ->capture_default_str();
}

int cmd_apex(const fs::path& video_path, double sigma, const fs::path& out_path, std::ostream& out) {
  out << "video=" << video_path.string() << "\nsigma=" << sigma << "\nout=" << out_path.string() << '\n';
  const auto video = read_video(video_path);
  const auto apex = apex_frame(video, sigma);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  write_video(VideoTensor(video.id() + "_apex", {apex.frame}), out_path);
  auto preview = out_path;
  preview.replace_extension(apex.frame.channels() == 1 ? ".pgm" : ".ppm");
  write_frame_image(apex.frame, preview);
  out << "wrote " << out_path.string() << " and " << preview.string() << '\n';
  return 0;
}

int cmd_segments(const fs::path& video_path, const std::vector<std::size_t>& lengths, double sigma,
                 const fs::path& out_dir, const std::string& domain, std::ostream& out) {
  out << "video=" << video_path.string() << "\nt=";
  for (std::size_t k = 0; k < lengths.size(); ++k) out << (k ? "," : "") << lengths[k];
  out << "\nsigma=" << sigma << "\nout_dir=" << out_dir.string() << "\ndomain=" << domain << '\n';
  const auto video = read_video(video_path);
  fs::create_directories(out_dir);
  DatasetManifest manifest;
  for (std::size_t t : lengths) {
    for (const auto& seg : split_segments(video, t)) {
      const auto apex = segment_apex(seg, sigma);
      const std::string name = video.id() + "_" + std::to_string(t) + "_" + std::to_string(seg.start) + "_" +
                               std::to_string(seg.end) + ".afv";
      write_video(VideoTensor(fs::path(name).stem().string(), {apex.frame}), out_dir / name);
      manifest.entries.push_back({name, Label::Unlabeled, Split::Train, domain});
    }
  }
  write_manifest(manifest, out_dir / "unlabeled_manifest.csv");
  out << "apex_count=" << manifest.entries.size() << '\n';
  return 0;
}

int cmd_train(const fs::path& manifest_path, TrainMode mode, const std::string& domain, const TrainConfig& config,
              const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  out << "manifest=" << manifest_path.string() << "\nmode=" << to_string(mode) << "\ndomain=" << domain
      << "\nout_dir=" << out_dir.string() << '\n';
  write_train_config(config, out);
  config.validate();
  auto manifest = load_manifest(manifest_path);
  if (!domain.empty()) manifest = manifest.filter_domain(domain);
  fs::create_directories(out_dir);

  std::pair<Classifier, TrainReport> trained;
  if (mode == TrainMode::Supervised) {
    trained = train_supervised(manifest, config);
  } else {
    const auto pool = pool_from_manifest(manifest, config);
    out << "unlabeled_pool=" << pool.apexes.size() << '\n';
    trained = train_semi_supervised(manifest, pool, config);
  }
  const auto& [classifier, report] = trained;
  save_classifier(classifier, out_dir / "classifier.afm");
  {
    auto csv = open_out(out_dir / "report.csv");
    write_report_csv(report, csv);
  }
  out << "classifier_best_step=" << report.best_step << "\nclassifier_best_val_auc=" << report.best_auc
      << "\nclassifier_stop=" << report.stop_reason << '@' << report.stop_step << '\n';

  if (mode == TrainMode::SslLstm) {
    const auto [head, lstm_report] = train_lstm_head(manifest, classifier, config);
    for (const auto& w : lstm_report.warnings) err << "warning: " << w << '\n';
    save_lstm_head(head, out_dir / "lstm.afm");
    auto csv = open_out(out_dir / "lstm_report.csv");
    write_report_csv(lstm_report, csv);
    out << "lstm_best_step=" << lstm_report.best_step << "\nlstm_best_val_auc=" << lstm_report.best_auc
        << "\nlstm_stop=" << lstm_report.stop_reason << '@' << lstm_report.stop_step << '\n';
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"apexfas: Gaussian apex frames, pseudo-label semi-supervised live/spoof training and "
               "threshold-transfer evaluation",
               "apexfas"};
  app.require_subcommand(1);

  // apex
  fs::path apex_video, apex_out;
  double apex_sigma = kDefaultSigma;
  auto* apex = app.add_subcommand("apex", "condense a video into its Gaussian-weighted apex frame");
  apex->add_option("--video", apex_video, "input AFV1 video")->required();
  apex->add_option("--sigma", apex_sigma, "Gaussian standard deviation in frames")->capture_default_str();
  apex->add_option("--out", apex_out, "output AFV1 path; a PGM/PPM preview is written next to it")->required();

  // segments
  fs::path seg_video, seg_out;
  std::vector<std::size_t> seg_lengths = kDefaultTemporalLengths;
  double seg_sigma = kDefaultSigma;
  std::string seg_domain = "pool";
  auto* segments = app.add_subcommand("segments", "write one apex per segment at each temporal length");
  segments->add_option("--video", seg_video, "input AFV1 video")->required();
  segments->add_option("--t", seg_lengths, "temporal lengths (comma separated)")->delimiter(',')->capture_default_str();
  segments->add_option("--sigma", seg_sigma, "Gaussian standard deviation in frames")->capture_default_str();
  segments->add_option("--out-dir", seg_out, "output directory")->required();
  segments->add_option("--domain", seg_domain, "domain tag for the unlabeled manifest")->capture_default_str();

  // synth
  fs::path synth_out, synth_config_path;
  std::vector<std::string> synth_sets;
  std::optional<std::uint64_t> synth_seed;
  std::optional<std::size_t> synth_videos, synth_frames, synth_size;
  bool synth_check = false;
  auto* synth = app.add_subcommand("synth", "generate a seeded synthetic multi-domain live/spoof dataset");
  synth->add_option("--out-dir", synth_out, "output directory (videos + manifest.csv)")->required();
  synth->add_option("--config", synth_config_path, "key=value config file")->check(CLI::ExistingFile);
  synth->add_option("--set", synth_sets, "extra key=value overrides (repeatable)");
  synth->add_option("--seed", synth_seed, "generator seed (default 7)");
  synth->add_option("--videos-per-class", synth_videos, "videos per class per domain (default 25)");
  synth->add_option("--frames", synth_frames, "frames per video (default 120)");
  synth->add_option("--size", synth_size, "frame height and width (default 32)");
  synth->add_flag("--check", synth_check, "print the class-separability AUC of the generated data");

  // train
  fs::path train_manifest, train_out;
  std::string train_mode = "ssl";
  std::string train_domain;
  TrainConfig train_config;
  bool augment = false;
  auto* train = app.add_subcommand("train", "train supervised, ssl or ssl+lstm models");
  train->add_option("--manifest", train_manifest, "dataset manifest")->required();
  train->add_option("--mode", train_mode, "supervised | ssl | ssl+lstm")->capture_default_str();
  train->add_option("--domain", train_domain, "restrict training to one domain tag");
  train->add_option("--out-dir", train_out, "where checkpoints and reports go")->required();
  add_train_flags(train, train_config, augment);

  // eval
  fs::path eval_source, eval_target, eval_classifier, eval_lstm, eval_out, eval_scores_out;
  std::string eval_mode = "ssl", eval_source_split = "test", eval_target_split = "test";
  std::string eval_source_domain, eval_target_domain;
  auto* eval = app.add_subcommand("eval", "EER threshold on the source set, HTER/AUC on the target set");
  eval->add_option("--source-manifest", eval_source, "manifest for threshold calibration")->required();
  eval->add_option("--target-manifest", eval_target, "manifest for the unseen target")->required();
  eval->add_option("--mode", eval_mode, "supervised | ssl | ssl+lstm")->capture_default_str();
  eval->add_option("--classifier", eval_classifier, "classifier checkpoint (supervised, ssl)");
  eval->add_option("--lstm", eval_lstm, "LSTM head checkpoint (ssl+lstm)");
  eval->add_option("--source-split", eval_source_split, "train | val | test | all")->capture_default_str();
  eval->add_option("--target-split", eval_target_split, "train | val | test | all")->capture_default_str();
  eval->add_option("--source-domain", eval_source_domain, "restrict the source to one domain tag");
  eval->add_option("--target-domain", eval_target_domain, "restrict the target to one domain tag");
  eval->add_option("--out", eval_out, "key=value report path")->required();
  eval->add_option("--scores-out", eval_scores_out, "optional target scores CSV (id,score,label)");

  // roc
  fs::path roc_scores, roc_svg, roc_csv;
  auto* roc = app.add_subcommand("roc", "ROC curve CSV and SVG from an id,score,label file");
  roc->add_option("--scores-csv", roc_scores, "scores file")->required();
  roc->add_option("--out-svg", roc_svg, "SVG output")->required();
  roc->add_option("--out-csv", roc_csv, "CSV output (threshold,fpr,tpr)")->required();

  // bench
  std::size_t bench_frames = 300, bench_size = 64, bench_reps = 5;
  double bench_sigma = kDefaultSigma;
  auto* bench = app.add_subcommand("bench", "apex-generation throughput on a random video");
  bench->add_option("--frames", bench_frames, "frames per video")->capture_default_str();
  bench->add_option("--size", bench_size, "frame height and width")->capture_default_str();
  bench->add_option("--reps", bench_reps, "timed repetitions (>= 3)")->capture_default_str();
  bench->add_option("--sigma", bench_sigma, "Gaussian standard deviation in frames")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*apex) {
      return cmd_apex(apex_video, apex_sigma, apex_out, out);
    }
    if (*segments) {
      return cmd_segments(seg_video, seg_lengths, seg_sigma, seg_out, seg_domain, out);
    }
    if (*synth) {
      SynthConfig config;
      if (!synth_config_path.empty()) {
        std::ifstream in(synth_config_path);
        config = parse_synth_config(in);
      }
      for (const auto& kv : synth_sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
        apply_synth_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (synth_seed) config.seed = *synth_seed;
      if (synth_videos) config.videos_per_class = *synth_videos;
      if (synth_frames) config.frames = *synth_frames;
      if (synth_size) config.height = config.width = *synth_size;
      config.validate();
      out << "out_dir=" << synth_out.string() << '\n';
      write_synth_config(config, out);
      const auto manifest = generate_dataset(config, synth_out);
      out << "videos=" << manifest.entries.size() << "\nmanifest=" << (synth_out / "manifest.csv").string() << '\n';
      if (synth_check) out << "separability_auc=" << class_separability_check(manifest) << '\n';
      return 0;
    }
    if (*train) {
      train_config.augmentation.enabled = augment;
      return cmd_train(train_manifest, parse_train_mode(train_mode), train_domain, train_config, train_out, out, err);
    }
    if (*eval) {
      const auto mode = parse_train_mode(eval_mode);
      out << "source_manifest=" << eval_source.string() << "\ntarget_manifest=" << eval_target.string()
          << "\nmode=" << eval_mode << "\nsource_split=" << eval_source_split
          << "\ntarget_split=" << eval_target_split << '\n';
      std::optional<Classifier> classifier;
      std::optional<LstmHead> head;
      if (mode == TrainMode::SslLstm) {
        if (eval_lstm.empty()) throw UsageError("--mode ssl+lstm requires --lstm");
        head = load_lstm_head(eval_lstm);
      } else {
        if (eval_classifier.empty()) throw UsageError("--mode " + eval_mode + " requires --classifier");
        classifier = load_classifier(eval_classifier);
      }
      const Classifier* cls = classifier ? &*classifier : nullptr;
      const LstmHead* lstm = head ? &*head : nullptr;
      const auto source_entries =
          select_entries(load_manifest(eval_source), eval_source_split, eval_source_domain);
      const auto target_entries =
          select_entries(load_manifest(eval_target), eval_target_split, eval_target_domain);
      const auto source_scores = score_videos(mode, cls, lstm, source_entries);
      const auto target_scores = score_videos(mode, cls, lstm, target_entries);
      const auto report = evaluate_transfer(to_score_set(source_scores), to_score_set(target_scores));
      {
        auto file = open_out(eval_out);
        write_eval_report(report, file);
      }
      if (!eval_scores_out.empty()) {
        auto file = open_out(eval_scores_out);
        write_scores_csv(target_scores, file);
      }
      write_eval_report(report, out);
      return 0;
    }
    if (*roc) {
      const auto scores = read_scores_csv(roc_scores);
      const auto curve = roc_curve(scores);
      {
        auto file = open_out(roc_csv);
        write_roc_csv(curve, file);
      }
      {
        auto file = open_out(roc_svg);
        write_roc_svg(curve, file);
      }
      out << "points=" << curve.points.size() << "\nauc=" << auc(curve) << '\n';
      return 0;
    }
    if (*bench) {
      if (bench_reps < 3) throw UsageError("--reps must be >= 3 for stable timing");
      if (bench_frames == 0 || bench_size == 0) throw UsageError("--frames and --size must be >= 1");
      out << "frames=" << bench_frames << "\nsize=" << bench_size << "\nreps=" << bench_reps
          << "\nsigma=" << bench_sigma << '\n';
      std::mt19937_64 rng(12345);
      std::uniform_real_distribution<float> unit(0.0f, 1.0f);
      std::vector<Frame> frames;
      for (std::size_t k = 0; k < bench_frames; ++k) {
        std::vector<float> px(bench_size * bench_size);
        for (auto& v : px) v = unit(rng);
        frames.emplace_back(bench_size, bench_size, 1, std::move(px));
      }
      const VideoTensor video("bench", std::move(frames));
      std::vector<double> ms;
      double sink = 0.0;
      for (std::size_t r = 0; r < bench_reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto apex = apex_frame(video, bench_sigma);
        const auto t1 = std::chrono::steady_clock::now();
        sink += apex.frame.pixels().front();
        ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
      }
      std::sort(ms.begin(), ms.end());
      const double median = ms[ms.size() / 2];
      out << "ms_per_video=" << median << "\nframes_per_sec="
          << static_cast<double>(bench_frames) / (std::max(median, 1e-9) / 1000.0) << "\nchecksum=" << sink << '\n';
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace apexfas::cli
