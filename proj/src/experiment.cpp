#include "msaprobe/experiment.h"

#include <array>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "msaprobe/annotations.h"
#include "msaprobe/checkpoint.h"
#include "msaprobe/errors.h"
#include "msaprobe/feature_store.h"
#include "msaprobe/hashing.h"
#include "msaprobe/pipeline.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace msaprobe {

namespace {

constexpr std::array<EncoderInfo, 19> kEncoders = {{
    {"musicfm-fma", 25.0, 1024, false},
    {"musicfm-msd", 25.0, 1024, false},
    {"mert-95m", 75.0, 768, false},
    {"mert-330m", 75.0, 1024, false},
    {"audiomae-huang", 6.25, 768, false},
    {"audiomae-zhong", 6.25, 3840, false},
    {"mule", 0.5, 1728, false},
    {"encodec-24k", 75.0, 128, false},
    {"encodec-48k", 150.0, 128, false},
    {"dac", 86.0, 1024, false},
    {"audiomae-huang-ft", 6.25, 768, false},
    {"audiomae-zhong-ft", 6.25, 3840, false},
    {"panns-tagging", 0.1, 2048, true},
    {"passt", 20.0, 768, false},
    {"panns-sed", 3.125, 2048, false},
    {"clap-music-audioset", 0.1, 512, true},
    {"clap-music-speech-audioset", 0.1, 512, true},
    {"openl3", 1.0, 6144, false},
    {"synth", 2.0, 16, false},
}};

template <typename T>
void read_if(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

}  // namespace

std::span<const EncoderInfo> encoder_inventory() { return kEncoders; }

const EncoderInfo* find_encoder(std::string_view model_id) {
  for (const EncoderInfo& e : kEncoders) {
    if (e.model_id == model_id) return &e;
  }
  return nullptr;
}

bool is_clip_level(const ExperimentConfig& cfg) {
  if (cfg.clip_level) return true;
  const EncoderInfo* e = find_encoder(cfg.model_id);
  return e != nullptr && e->clip_level;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.model_id.empty()) throw ValidationError("experiment: model id is required");
  if (cfg.folds < 3) throw ValidationError("experiment: need at least 3 folds (train/val/test)");
  validate(cfg.train);
  validate(cfg.pooling_spec);
  validate(cfg.peaks, kLabelRateHz);
  if (!cfg.pooling && is_clip_level(cfg)) {
    throw ValidationError("experiment: '" + cfg.model_id +
                          "' emits clip-level features only; run it with pooling enabled");
  }
}

std::string train_config_to_json(const TrainConfig& c) {
  json j;
  j["window_s"] = c.window_s;
  j["label_frames"] = c.label_frames;
  j["batch_size"] = c.batch_size;
  j["epochs"] = c.epochs;
  j["lr"] = c.lr;
  j["weight_decay"] = c.weight_decay;
  j["warmup_epochs"] = c.warmup_epochs;
  j["betas"] = {c.beta1, c.beta2};
  j["eps"] = c.eps;
  j["val_metric"] = to_string(c.val_metric);
  j["seed"] = c.seed;
  return j.dump();
}

std::string config_hash(const TrainConfig& cfg) { return sha256_hex(train_config_to_json(cfg)); }

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["model_id"] = cfg.model_id;
  j["pooling"] = cfg.pooling ? "on" : "off";
  j["pooling_window_s"] = cfg.pooling_spec.window_s;
  j["pooling_hop_s"] = cfg.pooling_spec.hop_s;
  j["train"] = json::parse(train_config_to_json(cfg.train));
  j["peak_pick"] = {{"max_window_s", cfg.peaks.max_window_s},
                    {"mean_window_s", cfg.peaks.mean_window_s},
                    {"delta", cfg.peaks.delta},
                    {"min_gap_s", cfg.peaks.min_gap_s}};
  j["folds"] = cfg.folds;
  j["output_dir"] = cfg.output_dir;
  j["seed"] = cfg.seed;
  j["clip_level"] = cfg.clip_level;
  return j.dump(2);
}

ExperimentConfig config_from_json(std::string_view json_text, ExperimentConfig cfg) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  try {
    read_if(j, "model_id", cfg.model_id);
    if (j.contains("pooling")) {
      const json& p = j.at("pooling");
      if (p.is_boolean()) {
        cfg.pooling = p.get<bool>();
      } else {
        const auto s = p.get<std::string>();
        if (s != "on" && s != "off") throw ValidationError("config: pooling must be 'on' or 'off'");
        cfg.pooling = s == "on";
      }
    }
    read_if(j, "pooling_window_s", cfg.pooling_spec.window_s);
    read_if(j, "pooling_hop_s", cfg.pooling_spec.hop_s);
    read_if(j, "folds", cfg.folds);
    read_if(j, "output_dir", cfg.output_dir);
    read_if(j, "seed", cfg.seed);
    read_if(j, "clip_level", cfg.clip_level);
    if (j.contains("train")) {
      const json& t = j.at("train");
      TrainConfig& c = cfg.train;
      read_if(t, "window_s", c.window_s);
      read_if(t, "label_frames", c.label_frames);
      read_if(t, "batch_size", c.batch_size);
      read_if(t, "epochs", c.epochs);
      read_if(t, "lr", c.lr);
      read_if(t, "weight_decay", c.weight_decay);
      read_if(t, "warmup_epochs", c.warmup_epochs);
      read_if(t, "eps", c.eps);
      read_if(t, "seed", c.seed);
      if (t.contains("betas")) {
        c.beta1 = t.at("betas").at(0).get<double>();
        c.beta2 = t.at("betas").at(1).get<double>();
      }
      if (t.contains("val_metric")) c.val_metric = validation_metric_from_string(t.at("val_metric").get<std::string>());
    }
    if (j.contains("peak_pick")) {
      const json& p = j.at("peak_pick");
      read_if(p, "max_window_s", cfg.peaks.max_window_s);
      read_if(p, "mean_window_s", cfg.peaks.mean_window_s);
      read_if(p, "delta", cfg.peaks.delta);
      read_if(p, "min_gap_s", cfg.peaks.min_gap_s);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return cfg;
}

std::vector<LabeledTrack> load_tracks(const Manifest& manifest, const ExperimentConfig& cfg) {
  std::vector<LabeledTrack> tracks;
  tracks.reserve(manifest.tracks.size());
  std::size_t dim = 0;
  for (const ManifestTrack& t : manifest.tracks) {
    auto it = t.features.find(cfg.model_id);
    if (it == t.features.end()) {
      throw ValidationError("track '" + t.track_id + "' has no features for model '" + cfg.model_id + "'");
    }
    FeatureMatrix features = load_features(it->second);
    check_duration(features, t.duration_s);
    if (dim == 0) dim = features.dim();
    if (features.dim() != dim) {
      throw ValidationError("track '" + t.track_id + "' has feature dim " + std::to_string(features.dim()) +
                            ", expected " + std::to_string(dim));
    }
    if (cfg.pooling) features = sliding_pool(features, cfg.pooling_spec);
    tracks.push_back(make_labeled_track(t.track_id, std::move(features), load_annotation(t.annotation_path)));
  }
  return tracks;
}

FoldResult run_fold(const std::vector<LabeledTrack>& tracks, const std::vector<Fold>& folds, std::size_t index,
                    const ExperimentConfig& cfg) {
  std::unordered_map<std::string, const LabeledTrack*> by_id;
  for (const LabeledTrack& t : tracks) by_id[t.id] = &t;
  auto gather = [&](const Fold& ids) {
    std::vector<LabeledTrack> out;
    out.reserve(ids.size());
    for (const std::string& id : ids) out.push_back(*by_id.at(id));
    return out;
  };

  const FoldSplit split = split_for(folds, index);
  FoldResult r;
  r.fold = index;
  r.seed = derive_seed(cfg.seed, index);
  r.test_ids = split.test;

  TrainConfig tcfg = cfg.train;
  tcfg.seed = r.seed;
  r.training = train(gather(split.train), gather(split.val), tcfg, cfg.peaks);

  for (const std::string& id : split.test) {
    const LabeledTrack& t = *by_id.at(id);
    auto est = predict_segmentation(r.training.model, t.features, t.annotation.duration_s, tcfg, cfg.peaks);
    r.scores.push_back(evaluate_track(t.annotation, est));
    r.predictions.push_back(std::move(est));
  }
  r.summary = summarize(r.scores);
  return r;
}

std::size_t worker_count() {
  if (const char* env = std::getenv("MSA_PROBE_THREADS")) {
    std::size_t n = 0;
    const std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec == std::errc() && ptr == s.data() + s.size() && n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

CvResult run_cv(const ExperimentConfig& cfg, const std::vector<LabeledTrack>& tracks) {
  validate(cfg);
  std::vector<std::string> ids;
  for (const LabeledTrack& t : tracks) ids.push_back(t.id);
  const auto folds = make_folds(ids, cfg.folds, cfg.seed);

  CvResult result;
  result.folds.resize(folds.size());
  std::vector<std::exception_ptr> errors(folds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < folds.size(); i = next++) {
      try {
        result.folds[i] = run_fold(tracks, folds, i, cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers = std::min(worker_count(), folds.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<ScoreSummary> summaries;
  for (const FoldResult& f : result.folds) summaries.push_back(f.summary);
  result.mean = mean_of(summaries);

  if (!cfg.output_dir.empty()) write_cv_artifacts(result, cfg, cfg.output_dir);
  return result;
}

CvResult run_cv(const ExperimentConfig& cfg, const Manifest& manifest) {
  validate(cfg);
  return run_cv(cfg, load_tracks(manifest, cfg));
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string history_csv(const std::vector<EpochRecord>& history) {
  std::ostringstream out;
  out << "epoch,lr,train_loss,val_score,val_hr05f,val_hr3f,val_pwf,val_acc\n";
  for (const EpochRecord& r : history) {
    out << r.epoch << ',' << format_number(r.lr) << ',' << format_number(r.train_loss) << ','
        << format_number(r.val_score) << ',' << format_number(r.val_hr05f) << ',' << format_number(r.val_hr3f)
        << ',' << format_number(r.val_pwf) << ',' << format_number(r.val_acc) << '\n';
  }
  return out.str();
}

std::string per_track_csv(const CvResult& result) {
  std::ostringstream out;
  out << "fold,track_id,hr05_p,hr05_r,hr05_f,hr3_p,hr3_r,hr3_f,pwf_p,pwf_r,pwf_f,acc\n";
  for (const FoldResult& f : result.folds) {
    for (std::size_t i = 0; i < f.test_ids.size(); ++i) {
      const TrackScores& s = f.scores[i];
      out << f.fold << ',' << f.test_ids[i];
      for (const PRF* p : {&s.hr05, &s.hr3, &s.pwf}) {
        out << ',' << format_number(p->precision) << ',' << format_number(p->recall) << ',' << format_number(p->f);
      }
      out << ',' << format_number(s.acc) << '\n';
    }
  }
  return out.str();
}

std::string results_csv(const CvResult& result) {
  std::ostringstream out;
  out << "fold,tracks,best_epoch,hr05f,hr3f,pwf,acc\n";
  auto row = [&](const std::string& name, const ScoreSummary& s, int best_epoch) {
    out << name << ',' << s.count << ',' << best_epoch << ',' << format_number(s.hr05f) << ','
        << format_number(s.hr3f) << ',' << format_number(s.pwf) << ',' << format_number(s.acc) << '\n';
  };
  for (const FoldResult& f : result.folds) row(std::to_string(f.fold), f.summary, f.training.best_epoch);
  row("mean", result.mean, -1);
  return out.str();
}

void write_cv_artifacts(const CvResult& result, const ExperimentConfig& cfg, const std::string& dir) {
  fs::create_directories(dir);
  auto write = [](const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + p.string());
    out << text;
  };
  write(fs::path(dir) / "config.json", config_to_json(cfg) + "\n");
  write(fs::path(dir) / "results.csv", results_csv(result));
  write(fs::path(dir) / "per_track.csv", per_track_csv(result));

  json summary;
  summary["model_id"] = cfg.model_id;
  summary["pooling"] = cfg.pooling;
  summary["folds"] = result.folds.size();
  summary["hr05f"] = result.mean.hr05f;
  summary["hr3f"] = result.mean.hr3f;
  summary["pwf"] = result.mean.pwf;
  summary["acc"] = result.mean.acc;
  write(fs::path(dir) / "summary.json", summary.dump(2) + "\n");

  for (const FoldResult& f : result.folds) {
    const fs::path fold_dir = fs::path(dir) / ("fold_" + std::to_string(f.fold));
    fs::create_directories(fold_dir / "predictions");
    TrainConfig tcfg = cfg.train;
    tcfg.seed = f.seed;
    save_checkpoint(f.training.model, tcfg, (fold_dir / "model.ckpt").string());
    write(fold_dir / "history.csv", history_csv(f.training.history));
    for (std::size_t i = 0; i < f.test_ids.size(); ++i) {
      write(fold_dir / "predictions" / (f.test_ids[i] + ".txt"), serialize_annotation(to_annotation(f.predictions[i])));
    }
  }
}

}  // namespace msaprobe
