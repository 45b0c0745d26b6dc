#pragma once

#include <span>
#include <vector>

#include "qsurf/dataset.hpp"
#include "qsurf/directional.hpp"
#include "qsurf/forecaster.hpp"
#include "qsurf/mlp.hpp"
#include "qsurf/point_model.hpp"
#include "qsurf/training.hpp"

namespace qsurf {

/// (1 - tau)*(q - o) when q >= o, tau*(o - q) otherwise. The expected loss
/// is minimized by the tau-quantile of the observation.
double pinball_loss(double observation, double predicted, double tau);
/// Subgradient with respect to `predicted`; the q == o tie takes the q >= o
/// branch, slope 1 - tau.
double pinball_slope(double observation, double predicted, double tau);

struct QsnnArchitecture {
  std::vector<std::size_t> hidden{10};
  Activation activation = Activation::Tanh;
};

/// Shared network with one linear output per quantile level. The input is the
/// direction (K components) followed by the feature vector (M components).
class QsnnModel final : public DirectionalQuantileModel {
 public:
  QsnnModel() = default;
  QsnnModel(Mlp net, std::vector<double> levels, std::size_t direction_dim, std::size_t feature_dim);

  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }
  const std::vector<double>& levels() const override { return levels_; }
  std::size_t direction_dim() const { return direction_dim_; }
  std::size_t feature_dim() const { return feature_dim_; }

  /// Head outputs before post-processing.
  std::vector<double> raw_outputs(std::span<const double> direction, std::span<const double> features) const;

  /// Clamped at zero and sorted ascending across levels.
  void radii(std::span<const double> direction, std::span<const double> features,
             std::span<double> out) const override;
  using DirectionalQuantileModel::radii;

 private:
  Mlp net_;
  std::vector<double> levels_;
  std::size_t direction_dim_ = 0;
  std::size_t feature_dim_ = 0;
};

/// Network inputs [u_i, x_i] and target lengths |o_i - y_i| for samples with
/// a nonzero forecast-adjusted observation.
struct QsnnTrainingSet {
  std::size_t input_dim = 0;
  std::vector<double> inputs;
  std::vector<double> lengths;
  std::vector<std::size_t> source_rows;
  std::size_t skipped_zero_length = 0;

  std::size_t size() const { return lengths.size(); }
  kernels::BatchView batch() const { return {inputs, lengths.size(), input_dim}; }
};

QsnnTrainingSet build_qsnn_training_set(const Dataset& data, const PointModel& point_model);

/// sum_i sum_l pinball(len_i, f_l(u_i, x_i), tau_l) + l2 * sum(w^2); when
/// `grad` is non-empty it receives the (sub)gradient. Serial reference path.
double qsnn_objective(const Mlp& net, const QsnnTrainingSet& set, std::span<const double> levels, double l2,
                      std::span<double> grad = {});

void validate_levels(std::span<const double> levels);

QsnnModel train_qsnn(const Dataset& data, const PointModel& point_model, const std::vector<double>& levels,
                     const QsnnArchitecture& architecture, const TrainConfig& config, TrainingLog* log = nullptr);

QuantileSurfaceForecast predict_surface(const QsnnModel& model, std::span<const double> point_estimate,
                                        std::span<const double> features, const std::vector<Vec>& directions);

double predict_radius(const QsnnModel& model, std::span<const double> direction, std::span<const double> features,
                      std::size_t level_index);

}  // namespace qsurf
