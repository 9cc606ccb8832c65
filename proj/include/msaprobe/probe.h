#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "msaprobe/annotations.h"
#include "msaprobe/feature_store.h"
#include "msaprobe/matrix.h"
#include "msaprobe/postprocess.h"

namespace msaprobe {

/// Output channel 0 is the boundary logit; channels 1..7 are function logits
/// in FunctionClass order.
inline constexpr std::size_t kProbeOutputs = 1 + kNumClasses;

/// Single linear layer mapping Z feature dims to 8 outputs.
struct ProbeModel {
  Matrix weight;             // Z x 8
  std::vector<double> bias;  // 8

  std::size_t feature_dim() const { return weight.rows(); }
  bool operator==(const ProbeModel&) const = default;
};

ProbeModel zero_model(std::size_t feature_dim);

/// weight ~ U(-1/sqrt(Z), 1/sqrt(Z)), bias = 0.
ProbeModel init_model(std::size_t feature_dim, std::uint64_t seed);

/// Score used to pick the best epoch on the validation fold.
enum class ValidationMetric { kHr05fAccMean, kHr05f, kHr3f, kPwf, kAcc };

std::string to_string(ValidationMetric m);
ValidationMetric validation_metric_from_string(const std::string& s);

struct TrainConfig {
  double window_s = 30.0;
  std::size_t label_frames = 60;
  std::size_t batch_size = 8;
  int epochs = 100;
  double lr = 1e-4;
  double weight_decay = 0.01;
  int warmup_epochs = 5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  ValidationMetric val_metric = ValidationMetric::kHr05fAccMean;
  std::uint64_t seed = 0;
};

void validate(const TrainConfig& cfg);

/// logits[t] = x[t] * weight + bias. Throws ValidationError on a dim mismatch.
Matrix forward(const ProbeModel& model, const Matrix& x);

/// Frame targets for one window. `mask[k] == 0` drops frame k from both
/// losses (padding past the end of a short track); an empty mask keeps all.
struct WindowTargets {
  std::vector<std::uint8_t> boundary;
  std::vector<std::uint8_t> function;
  std::vector<std::uint8_t> mask;

  std::size_t frames() const { return boundary.size(); }
};

struct LossResult {
  double loss = 0.0;  // bce + ce
  double bce = 0.0;
  double ce = 0.0;
  Matrix dlogits;     // d loss / d logits
};

/// Mean BCE on the boundary channel plus mean 7-way cross entropy on the
/// function channels, both over unmasked frames.
LossResult loss_and_grad(const Matrix& logits, const WindowTargets& targets);

struct ProbeGrad {
  Matrix weight;
  std::vector<double> bias;
};

/// Parameter gradients of a loss whose logit gradient is `dlogits`.
ProbeGrad backward(const Matrix& x, const Matrix& dlogits);

/// Features of [start_s, start_s + span_s) pooled to `out_frames` rows.
///
/// Rows are [round(start*fr), round((start+span)*fr)) clipped to the matrix.
/// With `pad` set, missing rows past the end are zeros so the window keeps
/// its nominal width; without it the window shrinks to the rows available
/// (at least one).
Matrix extract_window(const FeatureMatrix& m, double start_s, double span_s, std::size_t out_frames, bool pad);

struct TrackProbabilities {
  std::vector<double> boundary;  // T_track
  Matrix function;               // T_track x 7, rows sum to 1
};

/// Whole-track inference over consecutive non-overlapping windows; the last
/// short window is pooled to ceil(remaining_s * 2) frames. The output has
/// ceil(duration_s * 2) frames.
TrackProbabilities infer_track(const ProbeModel& model, const FeatureMatrix& m, double duration_s,
                               const TrainConfig& cfg = {});
TrackProbabilities infer_track(const ProbeModel& model, const FeatureMatrix& m, const TrainConfig& cfg = {});

struct LabeledTrack {
  std::string id;
  FeatureMatrix features;
  SegmentAnnotation annotation;
  FrameTargets targets;
};

/// Builds a LabeledTrack, rasterizing the annotation.
LabeledTrack make_labeled_track(std::string id, FeatureMatrix features, SegmentAnnotation annotation);

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double val_score = 0.0;
  double val_hr05f = 0.0;
  double val_hr3f = 0.0;
  double val_pwf = 0.0;
  double val_acc = 0.0;
};

struct TrainResult {
  ProbeModel model;
  std::vector<EpochRecord> history;
  int best_epoch = -1;  // -1 when no epoch ran
};

/// Trains on one random crop per track per epoch and keeps the parameters of
/// the epoch with the highest validation score (earliest on ties).
TrainResult train(const std::vector<LabeledTrack>& tracks, const std::vector<LabeledTrack>& val,
                  const TrainConfig& cfg, const PeakPickParams& peaks = {});

}  // namespace msaprobe
