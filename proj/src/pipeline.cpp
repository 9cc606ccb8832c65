#include "msaprobe/pipeline.h"

namespace msaprobe {

LabeledSegmentation predict_segmentation(const ProbeModel& model, const FeatureMatrix& features, double duration_s,
                                         const TrainConfig& cfg, const PeakPickParams& peaks) {
  const TrackProbabilities probs = infer_track(model, features, duration_s, cfg);
  const auto delimiters = peak_pick(probs.boundary, kLabelRateHz, peaks);
  return assign_functions(probs.function, delimiters, kLabelRateHz, duration_s);
}

std::vector<TrackScores> evaluate_tracks(const ProbeModel& model, const std::vector<LabeledTrack>& tracks,
                                         const TrainConfig& cfg, const PeakPickParams& peaks) {
  std::vector<TrackScores> out;
  out.reserve(tracks.size());
  for (const LabeledTrack& t : tracks) {
    const auto est = predict_segmentation(model, t.features, t.annotation.duration_s, cfg, peaks);
    out.push_back(evaluate_track(t.annotation, est));
  }
  return out;
}

double validation_score(const ScoreSummary& s, ValidationMetric metric) {
  switch (metric) {
    case ValidationMetric::kHr05fAccMean:
      return 0.5 * (s.hr05f + s.acc);
    case ValidationMetric::kHr05f:
      return s.hr05f;
    case ValidationMetric::kHr3f:
      return s.hr3f;
    case ValidationMetric::kPwf:
      return s.pwf;
    case ValidationMetric::kAcc:
      return s.acc;
  }
  return 0.0;
}

}  // namespace msaprobe
