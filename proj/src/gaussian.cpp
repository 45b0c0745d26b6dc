#include "qsurf/gaussian.hpp"

#include <cmath>
#include <numbers>

#include "qsurf/error.hpp"
#include "qsurf/kernels.hpp"
#include "qsurf/qsnn.hpp"

namespace qsurf {

namespace {

void require_planar(std::size_t dims, const char* what) {
  if (dims != 2) fail(ErrorKind::UnsupportedDimension, std::string(what) + " supports 2-D targets only");
}

double inverse_quadratic(const GaussianForecast& forecast, std::span<const double> direction) {
  require_planar(direction.size(), "Gaussian directional quantiles");
  const Matrix2 precision = forecast.covariance.inverse();
  const double q = precision.quadratic_form(direction[0], direction[1]);
  if (!(q > 0.0)) fail(ErrorKind::SingularCovariance, "covariance is not positive definite");
  return q;
}

}  // namespace

GaussianForecast fit_unconditional(const Dataset& data, const PointModel& point_model) {
  require_planar(data.target_dim, "fit_unconditional");
  if (data.size() < 3) fail(ErrorKind::EmptyDataset, "fit_unconditional needs at least 3 samples");
  double s00 = 0.0;
  double s01 = 0.0;
  double s11 = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto r = forecast_adjust(data.target(i), point_model.predict(data.feature(i)));
    s00 += r[0] * r[0];
    s01 += r[0] * r[1];
    s11 += r[1] * r[1];
  }
  const double n = static_cast<double>(data.size());
  GaussianForecast out;
  out.covariance = {{s00 / n, s01 / n, s01 / n, s11 / n}};
  const double det = out.covariance.determinant();
  if (!(det > 1e-12 * out.covariance.trace() * out.covariance.trace())) {
    fail(ErrorKind::SingularCovariance, "sample covariance is singular");
  }
  return out;
}

double mahalanobis(std::span<const double> point, const GaussianForecast& forecast) {
  require_planar(point.size(), "mahalanobis");
  const auto d = forecast_adjust(point, forecast.mean);
  const Matrix2 precision = forecast.covariance.inverse();
  return std::sqrt(std::max(precision.quadratic_form(d[0], d[1]), 0.0));
}

double gaussian_directional_quantile(const GaussianForecast& forecast, std::span<const double> direction,
                                     double tau) {
  const double q = inverse_quadratic(forecast, direction);
  return std::sqrt(chi2_inverse_cdf(tau, 2) / q);
}

double gaussian_directional_cdf(const GaussianForecast& forecast, std::span<const double> direction, double length) {
  if (!(length >= 0.0)) fail(ErrorKind::Domain, "length must be nonnegative");
  const double q = inverse_quadratic(forecast, direction);
  return chi2_cdf(length * length * q, 2);
}

CovarianceNet::CovarianceNet(Mlp net) : net_(std::move(net)) {
  if (net_.output_size() != 3) fail(ErrorKind::InvalidParameter, "covariance network needs 3 outputs");
}

namespace {

struct DecodedRaw {
  double log_sd0;
  double log_sd1;
  double rho;
  bool clamp0;
  bool clamp1;
};

DecodedRaw decode_parts(std::span<const double> raw) {
  const double b = CovarianceNet::kLogSdBound;
  DecodedRaw d{};
  d.clamp0 = raw[0] < -b || raw[0] > b;
  d.clamp1 = raw[1] < -b || raw[1] > b;
  d.log_sd0 = std::clamp(raw[0], -b, b);
  d.log_sd1 = std::clamp(raw[1], -b, b);
  d.rho = CovarianceNet::kMaxCorrelation * std::tanh(raw[2]);
  return d;
}

}  // namespace

Matrix2 CovarianceNet::decode(std::span<const double> raw) {
  if (raw.size() != 3) fail(ErrorKind::DimensionMismatch, "covariance decoding needs 3 raw values");
  const DecodedRaw d = decode_parts(raw);
  const double s0 = std::exp(d.log_sd0);
  const double s1 = std::exp(d.log_sd1);
  const double off = d.rho * s0 * s1;
  return {{s0 * s0, off, off, s1 * s1}};
}

Matrix2 CovarianceNet::covariance(std::span<const double> features) const { return decode(net_.forward(features)); }

double gaussian_nll(std::span<const double> raw, std::span<const double> residual, std::span<double> grad) {
  const DecodedRaw d = decode_parts(raw);
  const double z0 = residual[0] * std::exp(-d.log_sd0);
  const double z1 = residual[1] * std::exp(-d.log_sd1);
  const double rho = d.rho;
  const double one_minus = 1.0 - rho * rho;
  const double a = z0 * z0 + z1 * z1;
  const double b = z0 * z1;
  const double quad = (a - 2.0 * rho * b) / one_minus;
  const double nll = std::log(2.0 * std::numbers::pi) + d.log_sd0 + d.log_sd1 + 0.5 * std::log(one_minus) + 0.5 * quad;
  if (!grad.empty()) {
    grad[0] = d.clamp0 ? 0.0 : 1.0 - (z0 * z0 - rho * b) / one_minus;
    grad[1] = d.clamp1 ? 0.0 : 1.0 - (z1 * z1 - rho * b) / one_minus;
    const double dnll_drho = -rho / one_minus + (-b * one_minus + rho * (a - 2.0 * rho * b)) / (one_minus * one_minus);
    const double r = CovarianceNet::kMaxCorrelation;
    grad[2] = dnll_drho * (r - rho * rho / r);
  }
  return nll;
}

CovarianceTrainingSet build_covariance_training_set(const Dataset& data, const PointModel& point_model) {
  require_planar(data.target_dim, "covariance networks");
  CovarianceTrainingSet set;
  set.feature_dim = data.feature_dim;
  set.features = data.features;
  set.residuals.reserve(data.size() * 2);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto r = forecast_adjust(data.target(i), point_model.predict(data.feature(i)));
    set.residuals.insert(set.residuals.end(), r.begin(), r.end());
  }
  return set;
}

namespace {

struct NllLoss {
  std::span<const double> residuals;

  double operator()(std::size_t i, std::span<const double> out, std::span<double> out_grad) const {
    return gaussian_nll(out, residuals.subspan(2 * i, 2), out_grad);
  }
};

}  // namespace

double covariance_objective(const Mlp& net, const CovarianceTrainingSet& set, double l2, std::span<double> grad) {
  const NllLoss loss{set.residuals};
  if (grad.empty()) {
    MlpWorkspace ws(net);
    double total = 0.0;
    const auto batch = set.batch();
    for (std::size_t i = 0; i < set.size(); ++i) {
      total += gaussian_nll(forward_cached(net, batch.row(i), ws), std::span<const double>(set.residuals).subspan(2 * i, 2));
    }
    return total + l2_penalty(net, l2);
  }
  const double total = kernels::batch_loss_gradient_reference(net, set.batch(), loss, grad);
  return total + add_l2_penalty(net, l2, grad);
}

CovarianceNet fit_conditional(const Dataset& data, const PointModel& point_model,
                              const CovarianceArchitecture& architecture, const TrainConfig& config,
                              TrainingLog* log) {
  if (data.empty()) fail(ErrorKind::EmptyDataset, "conditional Gaussian needs samples");
  if (data.feature_dim == 0) fail(ErrorKind::InvalidParameter, "conditional Gaussian needs features");
  const CovarianceTrainingSet set = build_covariance_training_set(data, point_model);
  std::vector<std::size_t> sizes{data.feature_dim};
  sizes.insert(sizes.end(), architecture.hidden.begin(), architecture.hidden.end());
  sizes.push_back(3);
  Rng rng(mix_seed(config.seed, 0x434F'5641ULL));
  Mlp net = Mlp::glorot(sizes, architecture.activation, rng);
  optimize(net, set.batch(), NllLoss{set.residuals}, config, log);
  return CovarianceNet(std::move(net));
}

GaussianQuantileModel::GaussianQuantileModel(std::vector<double> levels, CovarianceFn covariance_at)
    : levels_(std::move(levels)), covariance_at_(std::move(covariance_at)) {
  validate_levels(levels_);
  for (double tau : levels_) chi2_quantiles_.push_back(chi2_inverse_cdf(tau, 2));
}

GaussianQuantileModel GaussianQuantileModel::unconditional(const GaussianForecast& forecast,
                                                           std::vector<double> levels) {
  const Matrix2 cov = forecast.covariance;
  return GaussianQuantileModel(std::move(levels), [cov](std::span<const double>) { return cov; });
}

GaussianQuantileModel GaussianQuantileModel::conditional(CovarianceNet net, std::vector<double> levels) {
  return GaussianQuantileModel(std::move(levels),
                               [net = std::move(net)](std::span<const double> x) { return net.covariance(x); });
}

void GaussianQuantileModel::radii(std::span<const double> direction, std::span<const double> features,
                                  std::span<double> out) const {
  require_planar(direction.size(), "Gaussian directional quantiles");
  const Matrix2 precision = covariance_at_(features).inverse();
  const double q = precision.quadratic_form(direction[0], direction[1]);
  if (!(q > 0.0)) fail(ErrorKind::SingularCovariance, "covariance is not positive definite");
  for (std::size_t l = 0; l < levels_.size(); ++l) out[l] = std::sqrt(chi2_quantiles_[l] / q);
}

}  // namespace qsurf
