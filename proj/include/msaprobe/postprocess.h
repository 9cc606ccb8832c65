#pragma once

#include <span>
#include <vector>

#include "msaprobe/matrix.h"
#include "msaprobe/segmentation.h"

namespace msaprobe {

/// Peak picking with a local-maximum test and a running-mean threshold.
struct PeakPickParams {
  double max_window_s = 6.0;   // local-maximum test spans +-max_window_s/2
  double mean_window_s = 12.0; // running mean spans +-mean_window_s/2
  double delta = 0.05;
  double min_gap_s = 1.0;
};

void validate(const PeakPickParams& p, double frame_rate_hz);

/// Interior boundary frames (0 < k < T), ascending.
///
/// Frame k qualifies when it beats every frame to its left within the
/// max window strictly and is >= every frame to its right (plateaus resolve
/// to their first frame), and when it clears the running mean by `delta`.
/// Candidates closer than min_gap_s keep the higher activation, the earlier
/// frame on ties.
std::vector<std::size_t> find_peaks(std::span<const double> activation, double frame_rate_hz, const PeakPickParams& p);

/// find_peaks plus the delimiters 0 and T.
std::vector<std::size_t> peak_pick(std::span<const double> activation, double frame_rate_hz, const PeakPickParams& p);

/// Labels each segment between consecutive delimiters with the argmax of its
/// mean function probabilities (lowest class id on ties). Interval times are
/// delimiter / frame_rate, with the final end set to `duration_s`.
LabeledSegmentation assign_functions(const Matrix& function_prob, std::span<const std::size_t> delimiters,
                                     double frame_rate_hz, double duration_s);

}  // namespace msaprobe
