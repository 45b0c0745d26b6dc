#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qsurf/dataset.hpp"
#include "qsurf/forecaster.hpp"
#include "qsurf/mlp.hpp"
#include "qsurf/numkit.hpp"
#include "qsurf/point_model.hpp"
#include "qsurf/training.hpp"

namespace qsurf {

/// Bivariate Gaussian forecast. In forecast-adjusted space the mean is zero.
struct GaussianForecast {
  Vec mean{0.0, 0.0};
  Matrix2 covariance;
};

/// Maximum-likelihood covariance (1/N normalizer) of the forecast-adjusted
/// observations, with the mean pinned to the point estimate.
GaussianForecast fit_unconditional(const Dataset& data, const PointModel& point_model);

double mahalanobis(std::span<const double> point, const GaussianForecast& forecast);

/// Distance along `direction` to the Mahalanobis ellipse of squared radius
/// chi2_2^{-1}(tau): sqrt(q / (u^T S^-1 u)).
double gaussian_directional_quantile(const GaussianForecast& forecast, std::span<const double> direction, double tau);

/// F_chi2(length^2 * u^T S^-1 u); inverse of gaussian_directional_quantile.
double gaussian_directional_cdf(const GaussianForecast& forecast, std::span<const double> direction, double length);

/// Feature -> covariance network. Raw outputs (a, b, c) decode to
/// sd1 = exp(a), sd2 = exp(b), rho = kMaxCorrelation * tanh(c).
class CovarianceNet {
 public:
  static constexpr double kMaxCorrelation = 0.999;
  static constexpr double kLogSdBound = 15.0;

  CovarianceNet() = default;
  explicit CovarianceNet(Mlp net);

  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }

  Matrix2 covariance(std::span<const double> features) const;

  static Matrix2 decode(std::span<const double> raw);

 private:
  Mlp net_;
};

/// Bivariate zero-mean Gaussian negative log-likelihood of `residual` under
/// the covariance decoded from `raw`; writes d(nll)/d(raw) when grad is given.
double gaussian_nll(std::span<const double> raw, std::span<const double> residual, std::span<double> grad = {});

/// Features and residuals used to fit a CovarianceNet.
struct CovarianceTrainingSet {
  std::size_t feature_dim = 0;
  std::vector<double> features;
  std::vector<double> residuals;  // N x 2

  std::size_t size() const { return residuals.size() / 2; }
  kernels::BatchView batch() const { return {features, size(), feature_dim}; }
};

CovarianceTrainingSet build_covariance_training_set(const Dataset& data, const PointModel& point_model);

/// Serial reference objective: sum of NLL plus L2, gradient into grad if given.
double covariance_objective(const Mlp& net, const CovarianceTrainingSet& set, double l2,
                            std::span<double> grad = {});

struct CovarianceArchitecture {
  std::vector<std::size_t> hidden{10};
  Activation activation = Activation::Tanh;
};

/// Fits a CovarianceNet by minimizing the summed NLL. Requires features.
CovarianceNet fit_conditional(const Dataset& data, const PointModel& point_model,
                              const CovarianceArchitecture& architecture, const TrainConfig& config,
                              TrainingLog* log = nullptr);

/// Gaussian directional quantiles at fixed levels, with a covariance that may
/// depend on the features.
class GaussianQuantileModel final : public DirectionalQuantileModel {
 public:
  using CovarianceFn = std::function<Matrix2(std::span<const double> features)>;

  GaussianQuantileModel(std::vector<double> levels, CovarianceFn covariance_at);

  static GaussianQuantileModel unconditional(const GaussianForecast& forecast, std::vector<double> levels);
  static GaussianQuantileModel conditional(CovarianceNet net, std::vector<double> levels);

  const std::vector<double>& levels() const override { return levels_; }
  void radii(std::span<const double> direction, std::span<const double> features,
             std::span<double> out) const override;
  using DirectionalQuantileModel::radii;

  Matrix2 covariance(std::span<const double> features) const { return covariance_at_(features); }

 private:
  std::vector<double> levels_;
  std::vector<double> chi2_quantiles_;
  CovarianceFn covariance_at_;
};

}  // namespace qsurf
