#include "msaprobe/optimizer.h"

#include <cmath>
#include <numbers>

#include "msaprobe/errors.h"

namespace msaprobe {

OptState init_opt_state(const ProbeModel& model) {
  OptState s;
  s.m_weight = Matrix(model.weight.rows(), model.weight.cols());
  s.v_weight = Matrix(model.weight.rows(), model.weight.cols());
  s.m_bias.assign(model.bias.size(), 0.0);
  s.v_bias.assign(model.bias.size(), 0.0);
  return s;
}

void adamw_update(std::span<double> param, std::span<const double> grad, std::span<double> m, std::span<double> v,
                  std::int64_t step, double lr, const TrainConfig& cfg) {
  if (grad.size() != param.size() || m.size() != param.size() || v.size() != param.size()) {
    throw ValidationError("adamw: tensor shapes differ");
  }
  const double t = static_cast<double>(step);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);
  const double decay = 1.0 - lr * cfg.weight_decay;
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = m[i] / correction1;
    const double v_hat = v[i] / correction2;
    param[i] = param[i] * decay - lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

void adamw_step(ProbeModel& model, OptState& state, const ProbeGrad& grads, double lr, const TrainConfig& cfg) {
  if (grads.weight.rows() != model.weight.rows() || grads.weight.cols() != model.weight.cols() ||
      grads.bias.size() != model.bias.size()) {
    throw ValidationError("adamw: gradient shape does not match the model");
  }
  ++state.step;
  adamw_update(model.weight.values(), grads.weight.values(), state.m_weight.values(), state.v_weight.values(),
               state.step, lr, cfg);
  adamw_update(model.bias, grads.bias, state.m_bias, state.v_bias, state.step, lr, cfg);
}

double lr_at(int epoch, const TrainConfig& cfg) {
  if (epoch < 0 || epoch >= cfg.epochs) throw ValidationError("lr_at: epoch out of range");
  if (epoch < cfg.warmup_epochs) {
    return cfg.lr * static_cast<double>(epoch + 1) / static_cast<double>(cfg.warmup_epochs);
  }
  const double progress =
      static_cast<double>(epoch - cfg.warmup_epochs) / static_cast<double>(cfg.epochs - cfg.warmup_epochs);
  return cfg.lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

}  // namespace msaprobe
