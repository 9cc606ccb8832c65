#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msaprobe/folds.h"
#include "msaprobe/manifest.h"
#include "msaprobe/metrics.h"
#include "msaprobe/pooling.h"
#include "msaprobe/postprocess.h"
#include "msaprobe/probe.h"

namespace msaprobe {

/// Known encoders and their native output. Clip-level encoders emit one
/// vector per clip and can only be probed through sliding pooling.
struct EncoderInfo {
  std::string_view model_id;
  double frame_rate_hz;
  std::size_t dim;
  bool clip_level;
};

std::span<const EncoderInfo> encoder_inventory();
const EncoderInfo* find_encoder(std::string_view model_id);

struct ExperimentConfig {
  std::string model_id;
  bool pooling = false;
  PoolingSpec pooling_spec;
  TrainConfig train;
  PeakPickParams peaks;
  std::size_t folds = 8;
  std::string output_dir;
  std::uint64_t seed = 0;
  /// Marks an encoder missing from the inventory as clip-level.
  bool clip_level = false;
};

bool is_clip_level(const ExperimentConfig& cfg);

/// Throws ValidationError for bad values, including a no-pooling run of a
/// clip-level encoder.
void validate(const ExperimentConfig& cfg);

/// Reads any subset of the ExperimentConfig fields from JSON on top of `base`.
ExperimentConfig config_from_json(std::string_view json_text, ExperimentConfig base = {});
std::string config_to_json(const ExperimentConfig& cfg);

std::string train_config_to_json(const TrainConfig& cfg);
/// SHA-256 of the canonical TrainConfig JSON.
std::string config_hash(const TrainConfig& cfg);

/// Loads features for cfg.model_id and annotations for every manifest
/// track, checks frame counts against the manifest duration, and applies
/// sliding pooling when enabled.
std::vector<LabeledTrack> load_tracks(const Manifest& manifest, const ExperimentConfig& cfg);

struct FoldResult {
  std::size_t fold = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> test_ids;
  std::vector<TrackScores> scores;
  std::vector<LabeledSegmentation> predictions;
  ScoreSummary summary;
  TrainResult training;
};

struct CvResult {
  std::vector<FoldResult> folds;
  ScoreSummary mean;
};

/// Trains, predicts and scores fold `index` of `folds`.
FoldResult run_fold(const std::vector<LabeledTrack>& tracks, const std::vector<Fold>& folds, std::size_t index,
                    const ExperimentConfig& cfg);

/// Full k-fold run. Folds run on up to worker_count() threads; results are
/// independent of the thread count. Writes artifacts when cfg.output_dir is
/// set.
CvResult run_cv(const ExperimentConfig& cfg, const Manifest& manifest);
CvResult run_cv(const ExperimentConfig& cfg, const std::vector<LabeledTrack>& tracks);

/// MSA_PROBE_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

/// results.csv, per_track.csv, summary.json, config.json, and per fold a
/// checkpoint, history.csv and predicted segmentations.
void write_cv_artifacts(const CvResult& result, const ExperimentConfig& cfg, const std::string& dir);

/// Shortest round-trip decimal form, used for every number in CSV output.
std::string format_number(double v);

std::string history_csv(const std::vector<EpochRecord>& history);
std::string per_track_csv(const CvResult& result);
std::string results_csv(const CvResult& result);

}  // namespace msaprobe
