#pragma once

#include <cstdint>
#include <span>

#include "msaprobe/probe.h"

namespace msaprobe {

/// AdamW moments for every probe parameter.
struct OptState {
  std::int64_t step = 0;
  Matrix m_weight, v_weight;
  std::vector<double> m_bias, v_bias;
};

OptState init_opt_state(const ProbeModel& model);

/// One AdamW update on a flat parameter tensor. `step` is the 1-based step
/// number used for bias correction.
void adamw_update(std::span<double> param, std::span<const double> grad, std::span<double> m, std::span<double> v,
                  std::int64_t step, double lr, const TrainConfig& cfg);

/// Decoupled weight decay and bias-corrected Adam on every parameter;
/// increments state.step.
void adamw_step(ProbeModel& model, OptState& state, const ProbeGrad& grads, double lr, const TrainConfig& cfg);

/// Per-epoch learning rate: linear warmup lr*(e+1)/warmup for the first
/// warmup epochs, then cosine annealing from lr towards 0.
double lr_at(int epoch, const TrainConfig& cfg);

}  // namespace msaprobe
