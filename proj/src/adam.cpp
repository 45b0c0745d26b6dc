#include "qsurf/adam.hpp"

#include <cmath>

#include "qsurf/error.hpp"

namespace qsurf {

Adam::Adam(std::size_t parameter_count, AdamConfig config)
    : config_(config), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {
  if (!(config.learning_rate > 0.0)) fail(ErrorKind::InvalidParameter, "Adam learning rate must be positive");
  if (!(config.beta1 >= 0.0 && config.beta1 < 1.0) || !(config.beta2 >= 0.0 && config.beta2 < 1.0)) {
    fail(ErrorKind::InvalidParameter, "Adam decay rates must lie in [0, 1)");
  }
  if (!(config.epsilon > 0.0)) fail(ErrorKind::InvalidParameter, "Adam epsilon must be positive");
}

void Adam::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    fail(ErrorKind::DimensionMismatch, "Adam state sized for a different parameter vector");
  }
  ++t_;
  beta1_power_ *= config_.beta1;
  beta2_power_ *= config_.beta2;
  const double c1 = 1.0 - beta1_power_;
  const double c2 = 1.0 - beta2_power_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const double g = grads[p];
    m_[p] = b1 * m_[p] + (1.0 - b1) * g;
    v_[p] = b2 * v_[p] + (1.0 - b2) * g * g;
    const double m_hat = m_[p] / c1;
    const double v_hat = v_[p] / c2;
    params[p] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
  }
}

}  // namespace qsurf
