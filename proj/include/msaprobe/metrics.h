#pragma once

// Segment-level evaluation metrics with the conventions of mir_eval's
// defaults: boundary endpoints are kept (no trimming), pairwise clustering
// is sampled on a 0.1 s grid, and an estimate is fit to the reference span
// before any metric is computed.

#include <cstdint>
#include <span>
#include <vector>

#include "msaprobe/annotations.h"
#include "msaprobe/segmentation.h"

namespace msaprobe {

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

/// Harmonic mean, 0 when precision + recall == 0.
PRF make_prf(double precision, double recall);

inline constexpr double kPairwiseGridS = 0.1;

/// Size of a maximum one-to-one matching between two ascending event lists
/// where a pair may match iff |r - e| <= window.
std::size_t match_events(std::span<const double> ref, std::span<const double> est, double window);

/// Hit-rate F-measure. Throws ValidationError when either list is unsorted.
PRF boundary_f(std::span<const double> ref, std::span<const double> est, double window);

/// Pairwise clustering F on already-sampled label sequences of equal length.
PRF pairwise_f_frames(std::span<const std::uint8_t> ref, std::span<const std::uint8_t> est);

/// Sampled labels at t_i = i * step for i < floor(duration / step).
std::vector<std::uint8_t> sample_labels(const LabeledSegmentation& seg, double step);

/// PWF. `est` is fit to the reference duration first.
PRF pairwise_f(const LabeledSegmentation& ref, const LabeledSegmentation& est);

double frame_accuracy_frames(std::span<const std::uint8_t> ref, std::span<const std::uint8_t> est);

/// Class ids at the centers of the ceil(duration * 2) label frames.
std::vector<std::uint8_t> frame_labels(const LabeledSegmentation& seg, double duration_s);

/// ACC at 2 Hz frame centers. `est` is fit to the reference duration first.
double frame_accuracy(const LabeledSegmentation& ref, const LabeledSegmentation& est);

struct TrackScores {
  PRF hr05;
  PRF hr3;
  PRF pwf;
  double acc = 0.0;
};

TrackScores evaluate_track(const SegmentAnnotation& ref, const LabeledSegmentation& est);

/// Unweighted means of the four headline values (F for the PRF metrics).
struct ScoreSummary {
  double hr05f = 0.0;
  double hr3f = 0.0;
  double pwf = 0.0;
  double acc = 0.0;
  std::size_t count = 0;
};

ScoreSummary summarize(std::span<const TrackScores> tracks);
ScoreSummary mean_of(std::span<const ScoreSummary> folds);

}  // namespace msaprobe
