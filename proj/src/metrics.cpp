#include "msaprobe/metrics.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "msaprobe/errors.h"

namespace msaprobe {

PRF make_prf(double precision, double recall) {
  PRF out{precision, recall, 0.0};
  if (precision + recall > 0.0) out.f = 2.0 * precision * recall / (precision + recall);
  return out;
}

namespace {

void require_sorted(std::span<const double> xs, const char* which) {
  if (!std::is_sorted(xs.begin(), xs.end())) {
    throw ValidationError(std::string("boundary list '") + which + "' is not sorted ascending");
  }
}

}  // namespace

std::size_t match_events(std::span<const double> ref, std::span<const double> est, double window) {
  // Both lists sorted and the tolerance is symmetric, so the compatibility
  // graph is an interval graph and the two-pointer greedy is optimal.
  std::size_t i = 0, j = 0, hits = 0;
  while (i < ref.size() && j < est.size()) {
    if (std::abs(ref[i] - est[j]) <= window) {
      ++hits;
      ++i;
      ++j;
    } else if (ref[i] < est[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return hits;
}

PRF boundary_f(std::span<const double> ref, std::span<const double> est, double window) {
  require_sorted(ref, "reference");
  require_sorted(est, "estimate");
  if (ref.empty() || est.empty()) return {};
  const auto hits = static_cast<double>(match_events(ref, est, window));
  return make_prf(hits / static_cast<double>(est.size()), hits / static_cast<double>(ref.size()));
}

PRF pairwise_f_frames(std::span<const std::uint8_t> ref, std::span<const std::uint8_t> est) {
  if (ref.size() != est.size()) throw ValidationError("pairwise_f: label sequences differ in length");
  if (ref.empty()) throw ValidationError("pairwise_f: zero-duration input");

  // Same-label pair counts from the contingency table instead of O(n^2).
  std::array<double, 256> ref_count{}, est_count{};
  std::vector<double> joint_flat(256 * 256, 0.0);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    ref_count[ref[i]] += 1.0;
    est_count[est[i]] += 1.0;
    joint_flat[ref[i] * 256 + est[i]] += 1.0;
  }
  auto pairs = [](double n) { return n * (n - 1.0) / 2.0; };
  double ref_pairs = 0.0, est_pairs = 0.0, both = 0.0;
  for (double n : ref_count) ref_pairs += pairs(n);
  for (double n : est_count) est_pairs += pairs(n);
  for (double n : joint_flat) both += pairs(n);

  const double precision = est_pairs > 0.0 ? both / est_pairs : 0.0;
  const double recall = ref_pairs > 0.0 ? both / ref_pairs : 0.0;
  return make_prf(precision, recall);
}

std::vector<std::uint8_t> sample_labels(const LabeledSegmentation& seg, double step) {
  // Grid size follows mir_eval.util.intervals_to_samples: floor(end / step).
  const auto n = static_cast<std::size_t>(std::floor(seg.duration_s() / step));
  std::vector<std::uint8_t> out(n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * step;
    while (k + 1 < seg.intervals.size() && seg.intervals[k + 1].start_s <= t) ++k;
    out[i] = static_cast<std::uint8_t>(class_id(seg.intervals[k].function));
  }
  return out;
}

PRF pairwise_f(const LabeledSegmentation& ref, const LabeledSegmentation& est) {
  validate(ref);
  const auto fitted = fit_to_duration(est, ref.duration_s());
  const auto r = sample_labels(ref, kPairwiseGridS);
  const auto e = sample_labels(fitted, kPairwiseGridS);
  return pairwise_f_frames(r, e);
}

double frame_accuracy_frames(std::span<const std::uint8_t> ref, std::span<const std::uint8_t> est) {
  if (ref.size() != est.size()) throw ValidationError("frame_accuracy: label sequences differ in length");
  if (ref.empty()) throw ValidationError("frame_accuracy: zero-duration input");
  std::size_t same = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) same += ref[i] == est[i];
  return static_cast<double>(same) / static_cast<double>(ref.size());
}

std::vector<std::uint8_t> frame_labels(const LabeledSegmentation& seg, double duration_s) {
  const std::size_t n = label_frame_count(duration_s);
  std::vector<std::uint8_t> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double center = (static_cast<double>(k) + 0.5) / kLabelRateHz;
    out[k] = static_cast<std::uint8_t>(class_id(class_at(seg, center)));
  }
  return out;
}

double frame_accuracy(const LabeledSegmentation& ref, const LabeledSegmentation& est) {
  validate(ref);
  const double duration = ref.duration_s();
  const auto fitted = fit_to_duration(est, duration);
  return frame_accuracy_frames(frame_labels(ref, duration), frame_labels(fitted, duration));
}

TrackScores evaluate_track(const SegmentAnnotation& ref_ann, const LabeledSegmentation& est) {
  validate(ref_ann);
  validate(est);
  const LabeledSegmentation ref = to_segmentation(ref_ann);
  const LabeledSegmentation fitted = fit_to_duration(est, ref_ann.duration_s);

  const auto ref_bounds = boundaries_of(ref_ann);
  const auto est_bounds = boundaries_of(to_annotation(fitted));

  TrackScores s;
  s.hr05 = boundary_f(ref_bounds, est_bounds, 0.5);
  s.hr3 = boundary_f(ref_bounds, est_bounds, 3.0);
  s.pwf = pairwise_f(ref, fitted);
  s.acc = frame_accuracy(ref, fitted);
  return s;
}

ScoreSummary summarize(std::span<const TrackScores> tracks) {
  ScoreSummary out;
  for (const TrackScores& t : tracks) {
    out.hr05f += t.hr05.f;
    out.hr3f += t.hr3.f;
    out.pwf += t.pwf.f;
    out.acc += t.acc;
  }
  out.count = tracks.size();
  if (out.count > 0) {
    const double n = static_cast<double>(out.count);
    out.hr05f /= n;
    out.hr3f /= n;
    out.pwf /= n;
    out.acc /= n;
  }
  return out;
}

ScoreSummary mean_of(std::span<const ScoreSummary> folds) {
  ScoreSummary out;
  for (const ScoreSummary& f : folds) {
    out.hr05f += f.hr05f;
    out.hr3f += f.hr3f;
    out.pwf += f.pwf;
    out.acc += f.acc;
    out.count += f.count;
  }
  if (!folds.empty()) {
    const double n = static_cast<double>(folds.size());
    out.hr05f /= n;
    out.hr3f /= n;
    out.pwf /= n;
    out.acc /= n;
  }
  return out;
}

}  // namespace msaprobe
