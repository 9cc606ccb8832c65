#include "msaprobe/segmentation.h"

#include <algorithm>
#include <cmath>

#include "msaprobe/errors.h"

namespace msaprobe {

void validate(const LabeledSegmentation& seg) {
  if (seg.intervals.empty()) throw ValidationError("segmentation has no intervals");
  if (seg.intervals.front().start_s != 0.0) throw ValidationError("segmentation must start at 0");
  for (std::size_t i = 0; i < seg.intervals.size(); ++i) {
    const Interval& iv = seg.intervals[i];
    if (!(iv.end_s > iv.start_s) || !std::isfinite(iv.end_s)) throw ValidationError("empty or invalid interval");
    if (i > 0 && iv.start_s != seg.intervals[i - 1].end_s) throw ValidationError("intervals are not contiguous");
  }
}

LabeledSegmentation to_segmentation(const SegmentAnnotation& ann) {
  LabeledSegmentation out;
  for (std::size_t i = 0; i < ann.segments.size(); ++i) {
    const double end = i + 1 < ann.segments.size() ? ann.segments[i + 1].start_s : ann.duration_s;
    out.intervals.push_back({ann.segments[i].start_s, end, ann.segments[i].function});
  }
  return out;
}

SegmentAnnotation to_annotation(const LabeledSegmentation& seg) {
  SegmentAnnotation ann;
  for (const Interval& iv : seg.intervals) ann.segments.push_back({iv.start_s, iv.function});
  ann.duration_s = seg.duration_s();
  return ann;
}

LabeledSegmentation fit_to_duration(const LabeledSegmentation& seg, double duration_s) {
  if (!(duration_s > 0.0)) throw ValidationError("target duration must be positive");
  LabeledSegmentation out;
  for (const Interval& iv : seg.intervals) {
    if (iv.start_s >= duration_s) break;
    out.intervals.push_back({iv.start_s, std::min(iv.end_s, duration_s), iv.function});
  }
  if (out.intervals.empty()) {
    out.intervals.push_back({0.0, duration_s, FunctionClass::kSilence});
  } else if (out.intervals.back().end_s < duration_s) {
    out.intervals.push_back({out.intervals.back().end_s, duration_s, FunctionClass::kSilence});
  }
  return out;
}

FunctionClass class_at(const LabeledSegmentation& seg, double t) {
  auto it = std::upper_bound(seg.intervals.begin(), seg.intervals.end(), t,
                             [](double value, const Interval& iv) { return value < iv.start_s; });
  if (it == seg.intervals.begin()) return seg.intervals.front().function;
  return std::prev(it)->function;
}

}  // namespace msaprobe
