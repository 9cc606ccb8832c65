#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. They are written for clarity, not speed, and share no code with the
// library beyond its plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "msaprobe/annotations.h"
#include "msaprobe/matrix.h"
#include "msaprobe/probe.h"
#include "msaprobe/segmentation.h"

namespace oracle {

using msaprobe::Matrix;

// Maximum matching by exhaustive search over which estimate each reference
// event takes (memoised on the set of estimates already used).
inline std::size_t max_matching(const std::vector<double>& ref, const std::vector<double>& est, double window) {
  const std::size_t n = ref.size();
  const std::size_t m = est.size();
  std::vector<std::vector<int>> memo(n + 1, std::vector<int>(std::size_t{1} << m, -1));
  auto solve = [&](auto&& self, std::size_t i, std::uint32_t used) -> int {
    if (i == n) return 0;
    int& slot = memo[i][used];
    if (slot >= 0) return slot;
    int best = self(self, i + 1, used);
    for (std::size_t j = 0; j < m; ++j) {
      if ((used >> j) & 1u) continue;
      if (std::fabs(ref[i] - est[j]) <= window) best = std::max(best, 1 + self(self, i + 1, used | (1u << j)));
    }
    return slot = best;
  };
  return static_cast<std::size_t>(solve(solve, 0, 0));
}

inline double f_measure(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

struct Prf {
  double p, r, f;
};

// Counts every unordered pair directly.
inline Prf pairwise(const std::vector<std::uint8_t>& ref, const std::vector<std::uint8_t>& est) {
  double agree_ref = 0, agree_est = 0, both = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    for (std::size_t j = i + 1; j < ref.size(); ++j) {
      const bool a = ref[i] == ref[j];
      const bool b = est[i] == est[j];
      agree_ref += a;
      agree_est += b;
      both += a && b;
    }
  }
  const double p = agree_est > 0 ? both / agree_est : 0.0;
  const double r = agree_ref > 0 ? both / agree_ref : 0.0;
  return {p, r, f_measure(p, r)};
}

inline double accuracy(const std::vector<std::uint8_t>& ref, const std::vector<std::uint8_t>& est) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) hit += ref[i] == est[i];
  return static_cast<double>(hit) / static_cast<double>(ref.size());
}

// Linear scan for the interval containing t; past the end means the last one.
inline std::uint8_t label_at(const msaprobe::LabeledSegmentation& seg, double t) {
  for (const auto& iv : seg.intervals) {
    if (t >= iv.start_s && t < iv.end_s) return static_cast<std::uint8_t>(iv.function);
  }
  return static_cast<std::uint8_t>(seg.intervals.back().function);
}

inline std::uint8_t label_at(const msaprobe::SegmentAnnotation& ann, double t) {
  std::uint8_t out = static_cast<std::uint8_t>(ann.segments.front().function);
  for (const auto& s : ann.segments) {
    if (s.start_s <= t) out = static_cast<std::uint8_t>(s.function);
  }
  return out;
}

inline Matrix sliding_pool(const Matrix& x, double fr, double window_s, double hop_s) {
  const std::size_t n = x.rows();
  const auto out_rows = static_cast<std::size_t>(std::ceil(static_cast<double>(n) / (hop_s * fr)));
  Matrix out(out_rows, x.cols());
  for (std::size_t i = 0; i < out_rows; ++i) {
    const double t0 = static_cast<double>(i) * hop_s;
    long b = std::lround(t0 * fr);
    long e = std::lround((t0 + window_s) * fr);
    b = std::clamp<long>(b, 0, static_cast<long>(n) - 1);
    e = std::clamp<long>(e, b + 1, static_cast<long>(n));
    for (std::size_t c = 0; c < x.cols(); ++c) {
      double sum = 0.0;
      for (long r = b; r < e; ++r) sum += x(static_cast<std::size_t>(r), c);
      out(i, c) = sum / static_cast<double>(e - b);
    }
  }
  return out;
}

inline Matrix adaptive_pool(const Matrix& x, std::size_t t_out) {
  const std::size_t n = x.rows();
  Matrix out(t_out, x.cols());
  for (std::size_t i = 0; i < t_out; ++i) {
    const std::size_t b = (i * n) / t_out;
    const std::size_t e = ((i + 1) * n + t_out - 1) / t_out;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      double sum = 0.0;
      for (std::size_t r = b; r < e; ++r) sum += x(r, c);
      out(i, c) = sum / static_cast<double>(e - b);
    }
  }
  return out;
}

inline Matrix forward(const msaprobe::ProbeModel& model, const Matrix& x) {
  Matrix out(x.rows(), model.weight.cols());
  for (std::size_t t = 0; t < x.rows(); ++t) {
    for (std::size_t o = 0; o < model.weight.cols(); ++o) {
      double acc = model.bias[o];
      for (std::size_t z = 0; z < x.cols(); ++z) acc += x(t, z) * model.weight(z, o);
      out(t, o) = acc;
    }
  }
  return out;
}

// Textbook loss: -[y log s + (1-y) log(1-s)] and -log softmax, computed with
// long double for headroom.
inline double loss(const Matrix& logits, const msaprobe::WindowTargets& tg) {
  long double bce = 0, ce = 0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < logits.rows(); ++t) {
    if (!tg.mask.empty() && !tg.mask[t]) continue;
    ++count;
    const long double z = logits(t, 0);
    const long double s = 1.0L / (1.0L + std::exp(-z));
    bce -= tg.boundary[t] ? std::log(s) : std::log1p(-s);
    long double mx = -std::numeric_limits<long double>::infinity();
    for (std::size_t k = 1; k < logits.cols(); ++k) mx = std::max<long double>(mx, logits(t, k));
    long double denom = 0;
    for (std::size_t k = 1; k < logits.cols(); ++k) denom += std::exp(logits(t, k) - mx);
    ce -= (logits(t, 1 + tg.function[t]) - mx) - std::log(denom);
  }
  if (count == 0) return 0.0;
  return static_cast<double>(bce / count + ce / count);
}

inline std::vector<double> sorted_uniform(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  std::sort(v.begin(), v.end());
  return v;
}

// Random valid annotation with times on a millisecond grid.
inline msaprobe::SegmentAnnotation random_annotation(std::mt19937_64& rng, int max_segments = 10) {
  std::uniform_int_distribution<int> count(1, max_segments);
  std::uniform_int_distribution<int> step_ms(1, 60000);
  std::uniform_int_distribution<int> cls(0, msaprobe::kNumClasses - 1);
  msaprobe::SegmentAnnotation ann;
  long t_ms = 0;
  const int k = count(rng);
  for (int i = 0; i < k; ++i) {
    ann.segments.push_back({static_cast<double>(t_ms) / 1000.0, msaprobe::class_from_id(cls(rng))});
    t_ms += step_ms(rng);
  }
  ann.duration_s = static_cast<double>(t_ms) / 1000.0;
  return ann;
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(rows, cols);
  for (auto& v : m.values()) v = g(rng);
  return m;
}

inline msaprobe::WindowTargets random_targets(std::mt19937_64& rng, std::size_t frames, bool with_mask) {
  std::uniform_int_distribution<int> bit(0, 1), cls(0, msaprobe::kNumClasses - 1);
  msaprobe::WindowTargets t;
  for (std::size_t k = 0; k < frames; ++k) {
    t.boundary.push_back(static_cast<std::uint8_t>(bit(rng)));
    t.function.push_back(static_cast<std::uint8_t>(cls(rng)));
    if (with_mask) t.mask.push_back(k == 0 ? 1 : static_cast<std::uint8_t>(bit(rng)));
  }
  return t;
}

inline msaprobe::ProbeModel random_model(std::mt19937_64& rng, std::size_t dim) {
  msaprobe::ProbeModel m = msaprobe::zero_model(dim);
  m.weight = random_matrix(rng, dim, msaprobe::kProbeOutputs);
  std::normal_distribution<double> g(0.0, 1.0);
  for (double& b : m.bias) b = g(rng);
  return m;
}

// Largest relative error |a - n| / max(|a|, |n|, floor) between the analytic
// gradient and central differences of the oracle loss.
inline double gradient_error(msaprobe::ProbeModel model, const Matrix& x, const msaprobe::WindowTargets& tg,
                             double floor) {
  const msaprobe::LossResult lr = msaprobe::loss_and_grad(msaprobe::forward(model, x), tg);
  const msaprobe::ProbeGrad g = msaprobe::backward(x, lr.dlogits);
  const double h = 1e-5;
  double worst = 0.0;
  auto probe = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + h;
    const double plus_at = param;
    const double f_plus = oracle::loss(oracle::forward(model, x), tg);
    param = saved - h;
    const double minus_at = param;
    const double f_minus = oracle::loss(oracle::forward(model, x), tg);
    param = saved;
    const double numeric = (f_plus - f_minus) / (plus_at - minus_at);
    const double scale = std::max({std::fabs(analytic), std::fabs(numeric), floor});
    worst = std::max(worst, std::fabs(analytic - numeric) / scale);
  };
  for (std::size_t i = 0; i < model.weight.values().size(); ++i) probe(model.weight.values()[i], g.weight.values()[i]);
  for (std::size_t i = 0; i < model.bias.size(); ++i) probe(model.bias[i], g.bias[i]);
  return worst;
}

}  // namespace oracle
