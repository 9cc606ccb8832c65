#include "msaprobe/postprocess.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "msaprobe/errors.h"

namespace msaprobe {

void validate(const PeakPickParams& p, double frame_rate_hz) {
  if (!(p.max_window_s > 0.0 && p.mean_window_s > 0.0 && p.delta > 0.0 && p.min_gap_s > 0.0)) {
    throw ValidationError("peak picking parameters must be positive");
  }
  if (p.min_gap_s < 1.0 / frame_rate_hz) throw ValidationError("min_gap_s must be at least one frame");
}

std::vector<std::size_t> find_peaks(std::span<const double> activation, double frame_rate_hz, const PeakPickParams& p) {
  validate(p, frame_rate_hz);
  const std::size_t n = activation.size();
  for (double a : activation) {
    if (!std::isfinite(a)) throw ValidationError("activation contains non-finite values");
  }
  const auto w = static_cast<std::ptrdiff_t>(std::round(p.max_window_s * frame_rate_hz / 2.0));
  const auto m = static_cast<std::ptrdiff_t>(std::round(p.mean_window_s * frame_rate_hz / 2.0));
  const auto sn = static_cast<std::ptrdiff_t>(n);

  std::vector<std::size_t> candidates;
  for (std::ptrdiff_t k = 1; k < sn; ++k) {
    const double a = activation[k];
    bool is_max = true;
    for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, k - w); j < k && is_max; ++j) is_max = a > activation[j];
    for (std::ptrdiff_t j = k + 1; j <= std::min(sn - 1, k + w) && is_max; ++j) is_max = a >= activation[j];
    if (!is_max) continue;

    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, k - m);
    const std::ptrdiff_t hi = std::min(sn - 1, k + m);
    double sum = 0.0;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) sum += activation[j];
    const double mean = sum / static_cast<double>(hi - lo + 1);
    if (a >= mean + p.delta) candidates.push_back(static_cast<std::size_t>(k));
  }

  // Enforce the minimum gap, strongest first.
  std::vector<std::size_t> order = candidates;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return activation[x] > activation[y]; });
  std::vector<std::size_t> kept;
  for (std::size_t k : order) {
    const bool clear = std::none_of(kept.begin(), kept.end(), [&](std::size_t q) {
      const double gap = std::abs(static_cast<double>(k) - static_cast<double>(q)) / frame_rate_hz;
      return gap < p.min_gap_s;
    });
    if (clear) kept.push_back(k);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<std::size_t> peak_pick(std::span<const double> activation, double frame_rate_hz, const PeakPickParams& p) {
  if (activation.empty()) throw ValidationError("peak_pick: empty activation");
  std::vector<std::size_t> out{0};
  for (std::size_t k : find_peaks(activation, frame_rate_hz, p)) out.push_back(k);
  out.push_back(activation.size());
  return out;
}

LabeledSegmentation assign_functions(const Matrix& function_prob, std::span<const std::size_t> delimiters,
                                     double frame_rate_hz, double duration_s) {
  const std::size_t frames = function_prob.rows();
  if (delimiters.size() < 2 || delimiters.front() != 0 || delimiters.back() != frames) {
    throw ValidationError("assign_functions: delimiters must start at 0 and end at T");
  }
  if (!(duration_s > 0.0)) throw ValidationError("assign_functions: duration must be positive");

  LabeledSegmentation out;
  std::vector<double> mean(function_prob.cols());
  for (std::size_t s = 0; s + 1 < delimiters.size(); ++s) {
    const std::size_t begin = delimiters[s];
    const std::size_t end = delimiters[s + 1];
    if (end <= begin) throw ValidationError("assign_functions: delimiters must be strictly ascending");

    std::fill(mean.begin(), mean.end(), 0.0);
    for (std::size_t r = begin; r < end; ++r) {
      const auto row = function_prob.row(r);
      for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += row[c];
    }
    const auto best = static_cast<int>(std::max_element(mean.begin(), mean.end()) - mean.begin());

    const double start_s = static_cast<double>(begin) / frame_rate_hz;
    if (start_s >= duration_s) break;
    const double end_s = s + 2 == delimiters.size() ? duration_s
                                                    : std::min(duration_s, static_cast<double>(end) / frame_rate_hz);
    out.intervals.push_back({start_s, end_s, class_from_id(best)});
  }
  out.intervals.back().end_s = duration_s;
  return out;
}

}  // namespace msaprobe
