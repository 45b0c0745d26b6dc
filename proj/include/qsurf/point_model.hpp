#pragma once

#include <span>
#include <string>
#include <vector>

#include "qsurf/dataset.hpp"
#include "qsurf/mlp.hpp"
#include "qsurf/training.hpp"

namespace qsurf {

enum class PointModelKind { Mean, Linear, Mlp };

std::string to_string(PointModelKind kind);
PointModelKind point_model_kind_from_string(const std::string& name);

struct PointModelConfig {
  PointModelKind kind = PointModelKind::Mean;
  std::vector<std::size_t> hidden{10};
  Activation activation = Activation::Tanh;
  TrainConfig train{.epochs = 5000, .learning_rate = 0.01, .l2 = 0.0};
};

/// Deterministic point estimate: features -> R^K.
class PointModel {
 public:
  PointModel() = default;

  static PointModel constant(std::vector<double> value);
  /// y = W x + b with W stored row-major (targets x features).
  static PointModel linear(std::size_t feature_dim, std::vector<double> weights, std::vector<double> bias);
  static PointModel network(Mlp net);

  PointModelKind kind() const { return kind_; }
  std::size_t feature_dim() const { return feature_dim_; }
  std::size_t target_dim() const { return target_dim_; }

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& bias() const { return bias_; }
  const Mlp& net() const { return net_; }

  std::vector<double> predict(std::span<const double> features) const;

 private:
  PointModelKind kind_ = PointModelKind::Mean;
  std::size_t feature_dim_ = 0;
  std::size_t target_dim_ = 0;
  std::vector<double> weights_;
  std::vector<double> bias_;
  Mlp net_;
};

/// Mean: sample mean. Linear: least squares with intercept. Mlp: squared
/// Euclidean error minimized with Adam. Linear and Mlp fall back to the mean
/// when the dataset has no features.
PointModel fit_point_model(const Dataset& data, const PointModelConfig& config = {});

/// Point estimate for every row of the dataset.
std::vector<std::vector<double>> predict_points(const PointModel& model, const Dataset& data);

}  // namespace qsurf
