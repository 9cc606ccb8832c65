#pragma once

#include "msaprobe/feature_store.h"
#include "msaprobe/matrix.h"

namespace msaprobe {

struct PoolingSpec {
  double window_s = 5.0;
  double hop_s = 0.5;
  bool enabled = true;
};

void validate(const PoolingSpec& spec);

/// Sliding-window average pooling to 1/hop_s Hz pseudo-features.
///
/// Output frame i averages input rows [round(i*hop*fr), round((i*hop + window)*fr))
/// clipped to [0, N). There are ceil(N / (hop*fr)) output frames. When the
/// window is narrower than one input frame or starts past the last row, it
/// is widened/clamped to the single nearest row so no output frame is empty.
FeatureMatrix sliding_pool(const FeatureMatrix& m, const PoolingSpec& spec);

/// Index range [begin, end) averaged by output frame `i` of sliding_pool.
struct RowRange {
  std::size_t begin;
  std::size_t end;
};
RowRange sliding_window_rows(std::size_t i, std::size_t n_rows, double frame_rate_hz, const PoolingSpec& spec);
std::size_t sliding_output_frames(std::size_t n_rows, double frame_rate_hz, const PoolingSpec& spec);

/// Adaptive average pooling to `out_rows` rows: row i averages input rows
/// [floor(i*N/T), ceil((i+1)*N/T)).
Matrix adaptive_avg_pool(const Matrix& x, std::size_t out_rows);

}  // namespace msaprobe
