#include "msaprobe/pooling.h"

#include <algorithm>
#include <cmath>

#include "msaprobe/errors.h"

namespace msaprobe {

void validate(const PoolingSpec& spec) {
  if (!(spec.hop_s > 0.0 && spec.window_s >= spec.hop_s && std::isfinite(spec.window_s))) {
    throw ValidationError("pooling: need window_s >= hop_s > 0");
  }
}

std::size_t sliding_output_frames(std::size_t n_rows, double frame_rate_hz, const PoolingSpec& spec) {
  return static_cast<std::size_t>(std::ceil(static_cast<double>(n_rows) / (spec.hop_s * frame_rate_hz)));
}

RowRange sliding_window_rows(std::size_t i, std::size_t n_rows, double frame_rate_hz, const PoolingSpec& spec) {
  const double start_s = static_cast<double>(i) * spec.hop_s;
  const double n = static_cast<double>(n_rows);
  const double lo = std::clamp(std::round(start_s * frame_rate_hz), 0.0, n - 1.0);
  const double hi = std::clamp(std::round((start_s + spec.window_s) * frame_rate_hz), lo + 1.0, n);
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

FeatureMatrix sliding_pool(const FeatureMatrix& m, const PoolingSpec& spec) {
  validate(spec);
  validate(m);
  const std::size_t n = m.frames();
  const std::size_t dim = m.dim();

  FeatureMatrix out;
  out.frame_rate_hz = 1.0 / spec.hop_s;
  const std::size_t count = sliding_output_frames(n, m.frame_rate_hz, spec);
  out.data = Matrix(count, dim);
  for (std::size_t i = 0; i < count; ++i) {
    const RowRange w = sliding_window_rows(i, n, m.frame_rate_hz, spec);
    const double inv = 1.0 / static_cast<double>(w.end - w.begin);
    auto dst = out.data.row(i);
    for (std::size_t r = w.begin; r < w.end; ++r) {
      const auto src = m.data.row(r);
      for (std::size_t c = 0; c < dim; ++c) dst[c] += src[c];
    }
    for (double& v : dst) v *= inv;
  }
  return out;
}

Matrix adaptive_avg_pool(const Matrix& x, std::size_t out_rows) {
  if (x.rows() == 0) throw ValidationError("adaptive_avg_pool: empty input");
  if (out_rows == 0) throw ValidationError("adaptive_avg_pool: output length must be >= 1");
  const std::size_t n = x.rows();
  Matrix out(out_rows, x.cols());
  for (std::size_t i = 0; i < out_rows; ++i) {
    const std::size_t begin = (i * n) / out_rows;
    const std::size_t end = ((i + 1) * n + out_rows - 1) / out_rows;
    const double inv = 1.0 / static_cast<double>(end - begin);
    auto dst = out.row(i);
    for (std::size_t r = begin; r < end; ++r) {
      const auto src = x.row(r);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
    }
    for (double& v : dst) v *= inv;
  }
  return out;
}

}  // namespace msaprobe
