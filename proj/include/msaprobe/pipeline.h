#pragma once

#include <vector>

#include "msaprobe/metrics.h"
#include "msaprobe/postprocess.h"
#include "msaprobe/probe.h"

namespace msaprobe {

/// infer_track, peak picking on the boundary channel, then per-segment
/// function argmax.
LabeledSegmentation predict_segmentation(const ProbeModel& model, const FeatureMatrix& features, double duration_s,
                                         const TrainConfig& cfg, const PeakPickParams& peaks);

std::vector<TrackScores> evaluate_tracks(const ProbeModel& model, const std::vector<LabeledTrack>& tracks,
                                         const TrainConfig& cfg, const PeakPickParams& peaks);

double validation_score(const ScoreSummary& s, ValidationMetric metric);

}  // namespace msaprobe
