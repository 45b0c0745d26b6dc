#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qsurf {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias-corrected moment estimates. Moments start at zero.
class Adam {
 public:
  Adam(std::size_t parameter_count, AdamConfig config);

  void step(std::span<double> params, std::span<const double> grads);

  std::size_t steps() const { return t_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t t_ = 0;
  double beta1_power_ = 1.0;
  double beta2_power_ = 1.0;
};

}  // namespace qsurf
