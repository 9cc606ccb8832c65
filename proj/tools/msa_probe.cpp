// msa-probe: linear-probe music structure analysis benchmark.
//
//   msa-probe synth  --out DIR [--tracks N --dim Z --frame-rate HZ --noise S --seed N]
//   msa-probe train  --manifest M --model ID --pooling on|off --out DIR [--fold I]
//   msa-probe eval   --manifest M --model ID --pooling on|off --checkpoint F --out DIR [--fold I]
//   msa-probe cv     --manifest M --model ID --pooling on|off --out DIR
//   msa-probe report RUN_DIR... [--out DIR]
//
// Every training subcommand also accepts --seed and --config <json>; flags
// override the config file. Exit status: 0 ok, 2 validation error, 1 other.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "msaprobe/annotations.h"
#include "msaprobe/checkpoint.h"
#include "msaprobe/errors.h"
#include "msaprobe/experiment.h"
#include "msaprobe/feature_store.h"
#include "msaprobe/folds.h"
#include "msaprobe/hashing.h"
#include "msaprobe/manifest.h"
#include "msaprobe/pipeline.h"
#include "msaprobe/report.h"
#include "msaprobe/synth.h"

namespace fs = std::filesystem;
using namespace msaprobe;

namespace {

struct CommonOptions {
  std::string manifest;
  std::string model;
  std::string pooling;
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<double> lr;
  std::optional<std::size_t> folds;
  std::optional<double> peak_max_window;
  std::optional<double> peak_mean_window;
  std::optional<double> peak_delta;
  std::optional<double> peak_min_gap;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--manifest", o.manifest, "Corpus manifest (JSON)")->required();
  cmd->add_option("--model", o.model, "Encoder id (key into each track's features)");
  cmd->add_option("--pooling", o.pooling, "Sliding 5 s / 0.5 s pooling")->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--seed", o.seed, "Experiment seed");
  cmd->add_option("--config", o.config, "Experiment config (JSON)");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--epochs", o.epochs, "Training epochs");
  cmd->add_option("--lr", o.lr, "Peak learning rate");
  cmd->add_option("--folds", o.folds, "Number of cross-validation folds");
  cmd->add_option("--peak-max-window", o.peak_max_window, "Local-maximum window (s)");
  cmd->add_option("--peak-mean-window", o.peak_mean_window, "Running-mean window (s)");
  cmd->add_option("--peak-delta", o.peak_delta, "Threshold above the running mean");
  cmd->add_option("--peak-min-gap", o.peak_min_gap, "Minimum gap between boundaries (s)");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
}

ExperimentConfig resolve_config(const CommonOptions& o) {
  ExperimentConfig cfg;
  if (!o.config.empty()) cfg = config_from_json(read_file(o.config), cfg);
  if (!o.model.empty()) cfg.model_id = o.model;
  if (!o.pooling.empty()) cfg.pooling = o.pooling == "on";
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.epochs) cfg.train.epochs = *o.epochs;
  if (o.lr) cfg.train.lr = *o.lr;
  if (o.folds) cfg.folds = *o.folds;
  if (o.peak_max_window) cfg.peaks.max_window_s = *o.peak_max_window;
  if (o.peak_mean_window) cfg.peaks.mean_window_s = *o.peak_mean_window;
  if (o.peak_delta) cfg.peaks.delta = *o.peak_delta;
  if (o.peak_min_gap) cfg.peaks.min_gap_s = *o.peak_min_gap;
  validate(cfg);
  return cfg;
}

void print_summary(const std::string& label, const ScoreSummary& s) {
  std::printf("%s  HR.5F %s  HR3F %s  PWF %s  ACC %s  (%zu tracks)\n", label.c_str(),
              format_percent(s.hr05f).c_str(), format_percent(s.hr3f).c_str(), format_percent(s.pwf).c_str(),
              format_percent(s.acc).c_str(), s.count);
}

struct SynthOptions {
  std::string out;
  std::size_t tracks = 64;
  std::string model = "synth";
  SynthConfig cfg;
};

int run_synth(const SynthOptions& o) {
  validate(o.cfg);
  fs::create_directories(fs::path(o.out) / "features");
  fs::create_directories(fs::path(o.out) / "annotations");
  Manifest manifest;
  for (std::size_t i = 0; i < o.tracks; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "track_%04zu", i);
    SynthConfig cfg = o.cfg;
    cfg.seed = o.cfg.seed * 1000003ull + i;
    auto [features, ann] = synth_track(cfg);

    const std::string feat_rel = "features/" + std::string(id) + ".faef";
    const std::string ann_rel = "annotations/" + std::string(id) + ".txt";
    save_features(features, (fs::path(o.out) / feat_rel).string());
    save_sidecar({o.model, std::nullopt, "synthetic", "msa-probe synth"}, (fs::path(o.out) / feat_rel).string());
    write_file(fs::path(o.out) / ann_rel, serialize_annotation(ann));
    manifest.tracks.push_back({id, ann_rel, ann.duration_s, {{o.model, feat_rel}}});
  }
  save_manifest(manifest, (fs::path(o.out) / "manifest.json").string());
  std::printf("wrote %zu synthetic tracks to %s\n", o.tracks, o.out.c_str());
  return 0;
}

std::vector<LabeledTrack> select(const std::vector<LabeledTrack>& tracks, const Fold& ids) {
  std::vector<LabeledTrack> out;
  for (const std::string& id : ids) {
    auto it = std::find_if(tracks.begin(), tracks.end(), [&](const LabeledTrack& t) { return t.id == id; });
    out.push_back(*it);
  }
  return out;
}

int run_train(const CommonOptions& o, std::size_t fold) {
  const ExperimentConfig cfg = resolve_config(o);
  if (cfg.output_dir.empty()) throw ValidationError("--out is required");
  const auto tracks = load_tracks(load_manifest(o.manifest), cfg);
  std::vector<std::string> ids;
  for (const auto& t : tracks) ids.push_back(t.id);
  const auto folds = make_folds(ids, cfg.folds, cfg.seed);
  if (fold >= folds.size()) throw ValidationError("--fold out of range");
  const FoldSplit split = split_for(folds, fold);

  TrainConfig tcfg = cfg.train;
  tcfg.seed = derive_seed(cfg.seed, fold);
  const TrainResult r = train(select(tracks, split.train), select(tracks, split.val), tcfg, cfg.peaks);

  fs::create_directories(cfg.output_dir);
  save_checkpoint(r.model, tcfg, (fs::path(cfg.output_dir) / "model.ckpt").string());
  write_file(fs::path(cfg.output_dir) / "history.csv", history_csv(r.history));
  write_file(fs::path(cfg.output_dir) / "config.json", config_to_json(cfg) + "\n");
  std::printf("fold %zu: best epoch %d of %zu, checkpoint in %s\n", fold, r.best_epoch, r.history.size(),
              cfg.output_dir.c_str());
  return 0;
}

int run_eval(const CommonOptions& o, const std::string& checkpoint, std::optional<std::size_t> fold) {
  const ExperimentConfig cfg = resolve_config(o);
  const auto tracks = load_tracks(load_manifest(o.manifest), cfg);
  const Checkpoint ck = load_checkpoint(checkpoint);

  std::vector<LabeledTrack> chosen = tracks;
  if (fold) {
    std::vector<std::string> ids;
    for (const auto& t : tracks) ids.push_back(t.id);
    const auto folds = make_folds(ids, cfg.folds, cfg.seed);
    if (*fold >= folds.size()) throw ValidationError("--fold out of range");
    chosen = select(tracks, folds[*fold]);
  }

  CvResult result;
  FoldResult& fr = result.folds.emplace_back();
  fr.fold = fold.value_or(0);
  for (const LabeledTrack& t : chosen) {
    auto est = predict_segmentation(ck.model, t.features, t.annotation.duration_s, cfg.train, cfg.peaks);
    fr.scores.push_back(evaluate_track(t.annotation, est));
    fr.test_ids.push_back(t.id);
    fr.predictions.push_back(std::move(est));
  }
  fr.summary = summarize(fr.scores);
  result.mean = fr.summary;

  if (!cfg.output_dir.empty()) {
    fs::create_directories(fs::path(cfg.output_dir) / "predictions");
    for (std::size_t i = 0; i < fr.test_ids.size(); ++i) {
      write_file(fs::path(cfg.output_dir) / "predictions" / (fr.test_ids[i] + ".txt"),
                 serialize_annotation(to_annotation(fr.predictions[i])));
    }
    write_file(fs::path(cfg.output_dir) / "per_track.csv", per_track_csv(result));
  }
  print_summary("eval", fr.summary);
  return 0;
}

int run_cv_command(const CommonOptions& o) {
  const ExperimentConfig cfg = resolve_config(o);
  const CvResult r = run_cv(cfg, load_manifest(o.manifest));
  for (const FoldResult& f : r.folds) print_summary("fold " + std::to_string(f.fold), f.summary);
  print_summary("mean  ", r.mean);
  if (!cfg.output_dir.empty()) std::printf("artifacts in %s\n", cfg.output_dir.c_str());
  return 0;
}

int run_report(const std::vector<std::string>& runs, const std::string& out) {
  const ReportTable table = collect_runs(runs);
  if (table.rows.empty()) throw ValidationError("report: no runs given");
  std::fputs(render_text(table).c_str(), stdout);
  if (!out.empty()) {
    fs::create_directories(out);
    write_file(fs::path(out) / "report.csv", to_csv(table));
    write_file(fs::path(out) / "report.md", render_markdown(table));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear-probe music structure analysis benchmark"};
  app.require_subcommand(1);

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus with a manifest");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--tracks", synth.tracks, "Number of tracks");
  synth_cmd->add_option("--model", synth.model, "Model id recorded in the manifest");
  synth_cmd->add_option("--dim", synth.cfg.dim, "Feature dimension");
  synth_cmd->add_option("--frame-rate", synth.cfg.frame_rate_hz, "Feature frame rate (Hz)");
  synth_cmd->add_option("--noise", synth.cfg.noise_std, "Per-dimension noise std");
  synth_cmd->add_option("--marker", synth.cfg.boundary_marker, "Transition marker amplitude");
  synth_cmd->add_option("--min-segments", synth.cfg.min_segments);
  synth_cmd->add_option("--max-segments", synth.cfg.max_segments);
  synth_cmd->add_option("--min-segment-s", synth.cfg.min_segment_s);
  synth_cmd->add_option("--max-segment-s", synth.cfg.max_segment_s);
  synth_cmd->add_option("--palette-seed", synth.cfg.palette_seed, "Seed for class geometry");
  synth_cmd->add_option("--seed", synth.cfg.seed, "Seed for track content");

  CommonOptions train_opts;
  std::size_t train_fold = 0;
  auto* train_cmd = app.add_subcommand("train", "Train the probe for one cross-validation fold");
  add_common(train_cmd, train_opts);
  train_cmd->add_option("--fold", train_fold, "Fold index (test fold; the next fold validates)");

  CommonOptions eval_opts;
  std::string checkpoint;
  std::optional<std::size_t> eval_fold;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  add_common(eval_cmd, eval_opts);
  eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint from 'train'")->required();
  eval_cmd->add_option("--fold", eval_fold, "Only evaluate this fold's tracks");

  CommonOptions cv_opts;
  auto* cv_cmd = app.add_subcommand("cv", "Run k-fold cross-validation");
  add_common(cv_cmd, cv_opts);

  std::vector<std::string> report_runs;
  std::string report_out;
  auto* report_cmd = app.add_subcommand("report", "Tabulate CV runs");
  report_cmd->add_option("runs", report_runs, "CV output directories")->required();
  report_cmd->add_option("--out", report_out, "Directory for report.csv and report.md");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*synth_cmd) return run_synth(synth);
    if (*train_cmd) return run_train(train_opts, train_fold);
    if (*eval_cmd) return run_eval(eval_opts, checkpoint, eval_fold);
    if (*cv_cmd) return run_cv_command(cv_opts);
    if (*report_cmd) return run_report(report_runs, report_out);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
