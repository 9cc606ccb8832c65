#include "msaprobe/probe.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "msaprobe/errors.h"
#include "msaprobe/optimizer.h"
#include "msaprobe/pipeline.h"
#include "msaprobe/pooling.h"

namespace msaprobe {

ProbeModel zero_model(std::size_t feature_dim) {
  ProbeModel m;
  m.weight = Matrix(feature_dim, kProbeOutputs);
  m.bias.assign(kProbeOutputs, 0.0);
  return m;
}

ProbeModel init_model(std::size_t feature_dim, std::uint64_t seed) {
  if (feature_dim == 0) throw ValidationError("feature dim must be >= 1");
  ProbeModel m = zero_model(feature_dim);
  std::mt19937_64 rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(feature_dim));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& w : m.weight.values()) w = dist(rng);
  return m;
}

std::string to_string(ValidationMetric m) {
  switch (m) {
    case ValidationMetric::kHr05fAccMean:
      return "hr05f+acc";
    case ValidationMetric::kHr05f:
      return "hr05f";
    case ValidationMetric::kHr3f:
      return "hr3f";
    case ValidationMetric::kPwf:
      return "pwf";
    case ValidationMetric::kAcc:
      return "acc";
  }
  return "?";
}

ValidationMetric validation_metric_from_string(const std::string& s) {
  for (auto m : {ValidationMetric::kHr05fAccMean, ValidationMetric::kHr05f, ValidationMetric::kHr3f,
                 ValidationMetric::kPwf, ValidationMetric::kAcc}) {
    if (to_string(m) == s) return m;
  }
  throw ValidationError("unknown validation metric '" + s + "'");
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.window_s > 0.0) || cfg.label_frames == 0 || cfg.batch_size == 0) {
    throw ValidationError("train config: window, label frames and batch size must be positive");
  }
  if (cfg.epochs < 0 || cfg.warmup_epochs < 1) throw ValidationError("train config: bad epoch counts");
  if (cfg.epochs > 0 && cfg.warmup_epochs >= cfg.epochs) {
    throw ValidationError("train config: warmup_epochs must be < epochs");
  }
  if (!(cfg.lr > 0.0) || !(cfg.weight_decay >= 0.0) || !(cfg.eps > 0.0)) {
    throw ValidationError("train config: lr and eps must be positive, weight decay non-negative");
  }
  if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0 && cfg.beta2 >= 0.0 && cfg.beta2 < 1.0)) {
    throw ValidationError("train config: betas must lie in [0, 1)");
  }
}

Matrix forward(const ProbeModel& model, const Matrix& x) {
  if (x.cols() != model.feature_dim()) {
    throw ValidationError("forward: input has " + std::to_string(x.cols()) + " dims, model expects " +
                          std::to_string(model.feature_dim()));
  }
  Matrix out(x.rows(), kProbeOutputs);
  for (std::size_t t = 0; t < x.rows(); ++t) {
    auto dst = out.row(t);
    std::copy(model.bias.begin(), model.bias.end(), dst.begin());
    const auto src = x.row(t);
    for (std::size_t z = 0; z < src.size(); ++z) {
      const auto w = model.weight.row(z);
      for (std::size_t o = 0; o < kProbeOutputs; ++o) dst[o] += src[z] * w[o];
    }
  }
  return out;
}

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Softmax over the function channels of one logit row, written into `out`.
// Returns log-sum-exp.
double function_softmax(std::span<const double> logits, std::span<double> out) {
  const double peak = *std::max_element(logits.begin() + 1, logits.end());
  double sum = 0.0;
  for (int c = 0; c < kNumClasses; ++c) sum += out[c] = std::exp(logits[1 + c] - peak);
  for (int c = 0; c < kNumClasses; ++c) out[c] /= sum;
  return peak + std::log(sum);
}

}  // namespace

LossResult loss_and_grad(const Matrix& logits, const WindowTargets& targets) {
  const std::size_t frames = logits.rows();
  if (logits.cols() != kProbeOutputs) throw ValidationError("loss: logits must have 8 channels");
  if (targets.boundary.size() != frames || targets.function.size() != frames ||
      (!targets.mask.empty() && targets.mask.size() != frames)) {
    throw ValidationError("loss: target length does not match logits");
  }

  LossResult r;
  r.dlogits = Matrix(frames, kProbeOutputs);
  std::size_t valid = 0;
  for (std::size_t t = 0; t < frames; ++t) valid += targets.mask.empty() || targets.mask[t];
  if (valid == 0) return r;
  const double inv = 1.0 / static_cast<double>(valid);

  std::array<double, kNumClasses> prob{};
  for (std::size_t t = 0; t < frames; ++t) {
    if (!targets.mask.empty() && !targets.mask[t]) continue;
    const auto row = logits.row(t);
    auto grad = r.dlogits.row(t);

    const double y = targets.boundary[t] ? 1.0 : 0.0;
    r.bce += softplus(row[0]) - y * row[0];
    grad[0] = (sigmoid(row[0]) - y) * inv;

    const int cls = targets.function[t];
    if (cls < 0 || cls >= kNumClasses) throw ValidationError("loss: function class out of range");
    const double lse = function_softmax(row, prob);
    r.ce += lse - row[1 + cls];
    for (int c = 0; c < kNumClasses; ++c) grad[1 + c] = (prob[c] - (c == cls ? 1.0 : 0.0)) * inv;
  }
  r.bce *= inv;
  r.ce *= inv;
  r.loss = r.bce + r.ce;
  return r;
}

ProbeGrad backward(const Matrix& x, const Matrix& dlogits) {
  if (x.rows() != dlogits.rows()) throw ValidationError("backward: row count mismatch");
  ProbeGrad g;
  g.weight = Matrix(x.cols(), dlogits.cols());
  g.bias.assign(dlogits.cols(), 0.0);
  for (std::size_t t = 0; t < x.rows(); ++t) {
    const auto xr = x.row(t);
    const auto dr = dlogits.row(t);
    for (std::size_t z = 0; z < xr.size(); ++z) {
      auto gw = g.weight.row(z);
      for (std::size_t o = 0; o < dr.size(); ++o) gw[o] += xr[z] * dr[o];
    }
    for (std::size_t o = 0; o < dr.size(); ++o) g.bias[o] += dr[o];
  }
  return g;
}

Matrix extract_window(const FeatureMatrix& m, double start_s, double span_s, std::size_t out_frames, bool pad) {
  const auto n = static_cast<long long>(m.frames());
  const auto r0 = static_cast<long long>(std::llround(start_s * m.frame_rate_hz));
  const auto r1 = static_cast<long long>(std::llround((start_s + span_s) * m.frame_rate_hz));
  const long long avail_begin = std::clamp(r0, 0LL, n);
  const long long avail_end = std::clamp(r1, avail_begin, n);

  Matrix rows;
  if (pad) {
    const long long width = std::max(1LL, r1 - r0);
    rows = Matrix(static_cast<std::size_t>(width), m.dim());
    for (long long r = avail_begin; r < avail_end && r - r0 < width; ++r) {
      const auto src = m.data.row(static_cast<std::size_t>(r));
      std::copy(src.begin(), src.end(), rows.row(static_cast<std::size_t>(r - r0)).begin());
    }
  } else {
    const long long begin = avail_end > avail_begin ? avail_begin : std::min(avail_begin, n - 1);
    const long long end = std::max(avail_end, begin + 1);
    rows = Matrix(static_cast<std::size_t>(end - begin), m.dim());
    for (long long r = begin; r < end; ++r) {
      const auto src = m.data.row(static_cast<std::size_t>(r));
      std::copy(src.begin(), src.end(), rows.row(static_cast<std::size_t>(r - begin)).begin());
    }
  }
  return adaptive_avg_pool(rows, out_frames);
}

TrackProbabilities infer_track(const ProbeModel& model, const FeatureMatrix& m, double duration_s,
                               const TrainConfig& cfg) {
  validate(m);
  if (!(duration_s > 0.0)) throw ValidationError("infer_track: duration must be positive");
  const std::size_t total = label_frame_count(duration_s);
  const std::size_t per_window = cfg.label_frames;

  TrackProbabilities out;
  out.boundary.resize(total);
  out.function = Matrix(total, kNumClasses);

  std::array<double, kNumClasses> prob{};
  for (std::size_t first = 0; first < total; first += per_window) {
    const std::size_t frames = std::min(per_window, total - first);
    const double start_s = static_cast<double>(first) / kLabelRateHz;
    // The final window takes every remaining feature row.
    const bool last = first + per_window >= total;
    const double span_s = last ? std::max(duration_s, m.duration_s()) - start_s : cfg.window_s;
    const Matrix logits = forward(model, extract_window(m, start_s, span_s, frames, false));
    for (std::size_t t = 0; t < frames; ++t) {
      const auto row = logits.row(t);
      out.boundary[first + t] = sigmoid(row[0]);
      function_softmax(row, prob);
      std::copy(prob.begin(), prob.end(), out.function.row(first + t).begin());
    }
  }
  return out;
}

TrackProbabilities infer_track(const ProbeModel& model, const FeatureMatrix& m, const TrainConfig& cfg) {
  return infer_track(model, m, m.duration_s(), cfg);
}

LabeledTrack make_labeled_track(std::string id, FeatureMatrix features, SegmentAnnotation annotation) {
  validate(annotation);
  validate(features);
  LabeledTrack t;
  t.id = std::move(id);
  t.targets = rasterize(annotation);
  t.features = std::move(features);
  t.annotation = std::move(annotation);
  return t;
}

namespace {

struct Crop {
  Matrix x;
  WindowTargets targets;
};

Crop draw_crop(const LabeledTrack& track, const TrainConfig& cfg, std::mt19937_64& rng) {
  const std::size_t total = track.targets.frames();
  const std::size_t t_frames = cfg.label_frames;
  std::size_t first = 0;
  if (total > t_frames) {
    std::uniform_int_distribution<std::size_t> dist(0, total - t_frames);
    first = dist(rng);
  }
  Crop c;
  const double start_s = static_cast<double>(first) / kLabelRateHz;
  c.x = extract_window(track.features, start_s, cfg.window_s, t_frames, true);
  c.targets.boundary.assign(t_frames, 0);
  c.targets.function.assign(t_frames, 0);
  c.targets.mask.assign(t_frames, 0);
  for (std::size_t k = 0; k < t_frames && first + k < total; ++k) {
    c.targets.boundary[k] = track.targets.boundary[first + k];
    c.targets.function[k] = track.targets.function[first + k];
    c.targets.mask[k] = 1;
  }
  return c;
}

}  // namespace

TrainResult train(const std::vector<LabeledTrack>& tracks, const std::vector<LabeledTrack>& val,
                  const TrainConfig& cfg, const PeakPickParams& peaks) {
  validate(cfg);
  if (tracks.empty()) throw ValidationError("train: empty training set");
  const std::size_t dim = tracks.front().features.dim();
  for (const auto* set : {&tracks, &val}) {
    for (const LabeledTrack& t : *set) {
      if (t.features.dim() != dim) throw ValidationError("train: track '" + t.id + "' has a different feature dim");
    }
  }

  std::mt19937_64 rng(cfg.seed);
  TrainResult result;
  result.model = init_model(dim, rng());
  if (cfg.epochs == 0) return result;
  if (val.empty()) throw ValidationError("train: empty validation set");

  ProbeModel model = result.model;
  OptState state = init_opt_state(model);
  double best_score = -1.0;

  std::vector<std::size_t> order(tracks.size());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = lr_at(epoch, cfg);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);

    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), b + cfg.batch_size);
      const double inv_batch = 1.0 / static_cast<double>(end - b);
      ProbeGrad grad{Matrix(dim, kProbeOutputs), std::vector<double>(kProbeOutputs, 0.0)};
      double batch_loss = 0.0;
      for (std::size_t i = b; i < end; ++i) {
        const Crop crop = draw_crop(tracks[order[i]], cfg, rng);
        const LossResult lr_out = loss_and_grad(forward(model, crop.x), crop.targets);
        const ProbeGrad g = backward(crop.x, lr_out.dlogits);
        batch_loss += lr_out.loss * inv_batch;
        auto gw = grad.weight.values();
        const auto sw = g.weight.values();
        for (std::size_t k = 0; k < gw.size(); ++k) gw[k] += sw[k] * inv_batch;
        for (std::size_t k = 0; k < kProbeOutputs; ++k) grad.bias[k] += g.bias[k] * inv_batch;
      }
      adamw_step(model, state, grad, lr, cfg);
      loss_sum += batch_loss;
      ++batches;
    }

    const auto scores = evaluate_tracks(model, val, cfg, peaks);
    const ScoreSummary summary = summarize(scores);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    rec.train_loss = loss_sum / static_cast<double>(batches);
    rec.val_score = validation_score(summary, cfg.val_metric);
    rec.val_hr05f = summary.hr05f;
    rec.val_hr3f = summary.hr3f;
    rec.val_pwf = summary.pwf;
    rec.val_acc = summary.acc;
    result.history.push_back(rec);

    if (rec.val_score > best_score) {
      best_score = rec.val_score;
      result.model = model;
      result.best_epoch = epoch;
    }
  }
  return result;
}

}  // namespace msaprobe
