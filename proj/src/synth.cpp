#include "msaprobe/synth.h"

#include <cmath>
#include <random>

#include "msaprobe/errors.h"

namespace msaprobe {

void validate(const SynthConfig& cfg) {
  if (cfg.dim < 2) throw ValidationError("synth: dim must be >= 2 to fit distinct unit-norm class means");
  if (!(cfg.frame_rate_hz > 0.0 && std::isfinite(cfg.frame_rate_hz))) throw ValidationError("synth: bad frame rate");
  if (cfg.min_segments < 1 || cfg.max_segments < cfg.min_segments) throw ValidationError("synth: bad segment count range");
  if (!(cfg.min_segment_s > 0.0 && cfg.max_segment_s >= cfg.min_segment_s && std::isfinite(cfg.max_segment_s))) {
    throw ValidationError("synth: bad segment length range");
  }
  if (cfg.class_count < 1 || cfg.class_count > kNumClasses) throw ValidationError("synth: class_count must be in 1..7");
  if (!(cfg.noise_std >= 0.0 && std::isfinite(cfg.noise_std))) throw ValidationError("synth: noise_std must be finite and >= 0");
  if (!std::isfinite(cfg.boundary_marker)) throw ValidationError("synth: boundary_marker must be finite");
}

Matrix synth_palette(std::size_t dim, int class_count, std::uint64_t palette_seed) {
  std::mt19937_64 rng(palette_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t rows = static_cast<std::size_t>(class_count) + 1;
  Matrix out(rows, dim);
  for (std::size_t r = 0; r < rows; ++r) {
    for (;;) {
      double norm2 = 0.0;
      for (auto& v : out.row(r)) {
        v = gauss(rng);
        norm2 += v * v;
      }
      if (norm2 < 1e-12) continue;
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& v : out.row(r)) v = static_cast<float>(v * inv);

      bool distinct = true;
      for (std::size_t q = 0; q < r && distinct; ++q) {
        double d2 = 0.0;
        for (std::size_t c = 0; c < dim; ++c) d2 += (out(r, c) - out(q, c)) * (out(r, c) - out(q, c));
        distinct = d2 > 1e-6;
      }
      if (distinct) break;
    }
  }
  return out;
}

std::pair<FeatureMatrix, SegmentAnnotation> synth_track(const SynthConfig& cfg) {
  validate(cfg);
  const Matrix palette = synth_palette(cfg.dim, cfg.class_count, cfg.palette_seed);
  const auto transition = palette.row(static_cast<std::size_t>(cfg.class_count));

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> count_dist(cfg.min_segments, cfg.max_segments);
  std::uniform_real_distribution<double> len_dist(cfg.min_segment_s, cfg.max_segment_s);
  std::uniform_int_distribution<int> class_dist(0, cfg.class_count - 1);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SegmentAnnotation ann;
  const int n_segments = count_dist(rng);
  double t = 0.0;
  int prev = -1;
  for (int i = 0; i < n_segments; ++i) {
    int c = class_dist(rng);
    // Adjacent segments get different classes when there is more than one.
    while (cfg.class_count > 1 && c == prev) c = class_dist(rng);
    prev = c;
    ann.segments.push_back({t, class_from_id(c)});
    // Starts sit on a millisecond grid but never on a label-frame center,
    // where nearest-frame boundary rounding and center sampling disagree.
    auto ms = std::llround((t + len_dist(rng)) * 1000.0);
    if (ms % 500 == 250) ++ms;
    t = static_cast<double>(ms) / 1000.0;
  }
  ann.duration_s = t;

  FeatureMatrix m;
  m.frame_rate_hz = cfg.frame_rate_hz;
  const auto frames = static_cast<std::size_t>(std::max(1.0, std::ceil(ann.duration_s * cfg.frame_rate_hz)));
  m.data = Matrix(frames, cfg.dim);

  std::vector<std::uint8_t> marked(frames, 0);
  for (std::size_t s = 1; s < ann.segments.size(); ++s) {
    const double k = std::round(ann.segments[s].start_s * kLabelRateHz);
    const double lo = k / kLabelRateHz;
    const double hi = (k + 1.0) / kLabelRateHz;
    bool any = false;
    for (std::size_t j = 0; j < frames; ++j) {
      const double center = (static_cast<double>(j) + 0.5) / cfg.frame_rate_hz;
      if (center >= lo && center < hi) marked[j] = any = true;
    }
    if (!any) {
      const auto j = static_cast<std::size_t>(std::floor((lo + 0.25) * cfg.frame_rate_hz));
      marked[std::min(j, frames - 1)] = 1;
    }
  }

  for (std::size_t j = 0; j < frames; ++j) {
    const double center = (static_cast<double>(j) + 0.5) / cfg.frame_rate_hz;
    const auto mean = palette.row(static_cast<std::size_t>(class_id(class_at(ann, center))));
    auto row = m.data.row(j);
    for (std::size_t c = 0; c < cfg.dim; ++c) {
      double v = mean[c];
      if (marked[j]) v += cfg.boundary_marker * transition[c];
      if (cfg.noise_std > 0.0) v += cfg.noise_std * gauss(rng);
      row[c] = static_cast<float>(v);
    }
  }
  return {std::move(m), std::move(ann)};
}

}  // namespace msaprobe
