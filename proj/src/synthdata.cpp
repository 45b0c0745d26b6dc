#include "qsurf/synthdata.hpp"

#include <cmath>
#include <numbers>

#include "qsurf/error.hpp"

namespace qsurf {

std::string to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::Mgd: return "mgd";
    case SyntheticKind::Smd: return "smd";
    case SyntheticKind::Cmgd: return "cmgd";
  }
  return "unknown";
}

SyntheticKind synthetic_kind_from_string(const std::string& name) {
  if (name == "mgd") return SyntheticKind::Mgd;
  if (name == "smd") return SyntheticKind::Smd;
  if (name == "cmgd") return SyntheticKind::Cmgd;
  fail(ErrorKind::InvalidParameter, "unknown synthetic dataset '" + name + "'");
}

namespace {

constexpr double kMgdVar0 = 0.5;
constexpr double kMgdVar1 = 2.0;
constexpr double kSmdMean = 1.0;
constexpr double kSmdSd = 3.0;
constexpr double kSmdScale = 4.0;
constexpr Matrix2 kCmgdCov0{{0.5, 0.0, 0.0, 7.5}};
constexpr Matrix2 kCmgdCov1{{5.0, 0.0, 0.0, 0.5}};

void require_rows(std::size_t n) {
  if (n == 0) fail(ErrorKind::InvalidParameter, "sample count must be >= 1");
}

std::array<double, 2> draw_gaussian(Rng& rng, const Matrix2& chol) {
  const double z0 = sample_standard_normal(rng);
  const double z1 = sample_standard_normal(rng);
  return {chol(0, 0) * z0, chol(1, 0) * z0 + chol(1, 1) * z1};
}

}  // namespace

Dataset gen_mgd(Rng& rng, std::size_t n) {
  require_rows(n);
  Dataset data(0, 2);
  const Matrix2 chol = cholesky2(Matrix2::diagonal(kMgdVar0, kMgdVar1));
  for (std::size_t i = 0; i < n; ++i) {
    const auto y = draw_gaussian(rng, chol);
    data.push_back({}, y);
  }
  return data;
}

Dataset gen_smd(Rng& rng, std::size_t n) {
  require_rows(n);
  Dataset data(0, 2);
  const double c = std::cos(std::numbers::pi / 4.0);
  const double s = std::sin(std::numbers::pi / 4.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = kSmdMean + kSmdSd * sample_standard_normal(rng);
    const double b = sample_exponential(rng, kSmdScale);
    const std::array<double, 2> y{c * a - s * b, s * a + c * b};
    data.push_back({}, y);
  }
  return data;
}

Dataset gen_cmgd(Rng& rng, std::size_t n) {
  require_rows(n);
  if (n % 2 != 0) fail(ErrorKind::InvalidParameter, "CMGD needs an even sample count");
  Dataset data(1, 2);
  const Matrix2 chol0 = cholesky2(kCmgdCov0);
  const Matrix2 chol1 = cholesky2(kCmgdCov1);
  for (std::size_t i = 0; i < n; ++i) {
    const double condition = static_cast<double>(i % 2);
    const auto y = draw_gaussian(rng, condition == 0.0 ? chol0 : chol1);
    const std::array<double, 1> x{condition};
    data.push_back(x, y);
  }
  return data;
}

Dataset generate(SyntheticKind kind, Rng& rng, std::size_t n) {
  switch (kind) {
    case SyntheticKind::Mgd: return gen_mgd(rng, n);
    case SyntheticKind::Smd: return gen_smd(rng, n);
    case SyntheticKind::Cmgd: return gen_cmgd(rng, n);
  }
  fail(ErrorKind::InvalidParameter, "unknown synthetic dataset");
}

Dataset generate(const SyntheticSpec& spec, SplitKind split) {
  if (split == SplitKind::Train) {
    Rng rng(mix_seed(spec.seed, 0x5452'4149ULL));
    return generate(spec.kind, rng, spec.train_count);
  }
  Rng rng(mix_seed(spec.seed, 0x5445'5354ULL));
  return generate(spec.kind, rng, spec.test_count);
}

SyntheticSplit generate(const SyntheticSpec& spec) {
  return {generate(spec, SplitKind::Train), generate(spec, SplitKind::Test)};
}

Matrix2 true_covariance(SyntheticKind kind, std::span<const double> features) {
  switch (kind) {
    case SyntheticKind::Mgd:
      return Matrix2::diagonal(kMgdVar0, kMgdVar1);
    case SyntheticKind::Cmgd:
      if (features.size() != 1) fail(ErrorKind::DimensionMismatch, "CMGD has one binary feature");
      return features[0] == 0.0 ? kCmgdCov0 : kCmgdCov1;
    case SyntheticKind::Smd:
      break;
  }
  fail(ErrorKind::Unsupported, "the skewed distribution has no closed-form directional quantiles");
}

double true_directional_quantile(SyntheticKind kind, std::span<const double> features,
                                 std::span<const double> direction, double tau) {
  GaussianForecast forecast;
  forecast.covariance = true_covariance(kind, features);
  return gaussian_directional_quantile(forecast, direction, tau);
}

GaussianQuantileModel true_quantile_model(SyntheticKind kind, std::vector<double> levels) {
  if (kind == SyntheticKind::Smd) {
    fail(ErrorKind::Unsupported, "the skewed distribution has no closed-form directional quantiles");
  }
  return GaussianQuantileModel(std::move(levels), [kind](std::span<const double> x) { return true_covariance(kind, x); });
}

}  // namespace qsurf
