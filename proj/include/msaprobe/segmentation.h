#pragma once

#include <string>
#include <vector>

#include "msaprobe/annotations.h"

namespace msaprobe {

struct Interval {
  double start_s;
  double end_s;
  FunctionClass function;

  bool operator==(const Interval&) const = default;
};

/// Contiguous, non-overlapping labeled intervals covering [0, duration].
struct LabeledSegmentation {
  std::vector<Interval> intervals;

  double duration_s() const { return intervals.empty() ? 0.0 : intervals.back().end_s; }
  bool operator==(const LabeledSegmentation&) const = default;
};

void validate(const LabeledSegmentation& seg);

LabeledSegmentation to_segmentation(const SegmentAnnotation& ann);
SegmentAnnotation to_annotation(const LabeledSegmentation& seg);

/// Clamps or extends `seg` so that it ends exactly at `duration_s`. Extension
/// appends a silence interval; clamping drops intervals starting at or after
/// the new end.
LabeledSegmentation fit_to_duration(const LabeledSegmentation& seg, double duration_s);

/// Class at time `t`; times at or past the end map to the last interval.
FunctionClass class_at(const LabeledSegmentation& seg, double t);

}  // namespace msaprobe
