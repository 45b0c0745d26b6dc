#include "qsurf/numkit.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "qsurf/error.hpp"

namespace qsurf {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t x = seed;
  for (auto& word : s_) word = splitmix64(x);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t x = seed ^ (tag * 0xD1B54A32D192ED03ULL);
  splitmix64(x);
  return splitmix64(x);
}

double sample_standard_normal(Rng& rng) {
  if (rng.spare_normal_) {
    const double z = *rng.spare_normal_;
    rng.spare_normal_.reset();
    return z;
  }
  const double u1 = 1.0 - rng.uniform();  // (0, 1]
  const double u2 = rng.uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  rng.spare_normal_ = r * std::sin(angle);
  return r * std::cos(angle);
}

double sample_exponential(Rng& rng, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    fail(ErrorKind::InvalidParameter, "exponential scale must be positive, got " + std::to_string(scale));
  }
  return -scale * std::log1p(-rng.uniform());
}

double sample_uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

double chi2_cdf(double x, int dof) {
  if (dof < 1) fail(ErrorKind::InvalidParameter, "chi2 degrees of freedom must be >= 1");
  if (!(x >= 0.0)) fail(ErrorKind::Domain, "chi2_cdf needs x >= 0, got " + std::to_string(x));
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (dof == 2) return -std::expm1(-0.5 * x);
  return boost::math::gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_inverse_cdf(double tau, int dof) {
  if (dof < 1) fail(ErrorKind::InvalidParameter, "chi2 degrees of freedom must be >= 1");
  if (!(tau > 0.0 && tau < 1.0)) {
    fail(ErrorKind::Domain, "chi2_inverse_cdf needs tau in (0,1), got " + std::to_string(tau));
  }
  if (dof == 2) return -2.0 * std::log1p(-tau);
  return 2.0 * boost::math::gamma_p_inv(0.5 * dof, tau);
}

Matrix2 Matrix2::inverse() const {
  const double det = determinant();
  const double scale = std::abs(m[0]) + std::abs(m[1]) + std::abs(m[2]) + std::abs(m[3]);
  if (!(std::abs(det) > 1e-14 * scale * scale) || !std::isfinite(det)) {
    fail(ErrorKind::SingularCovariance, "matrix is singular (det = " + std::to_string(det) + ")");
  }
  return {{m[3] / det, -m[1] / det, -m[2] / det, m[0] / det}};
}

bool Matrix2::is_symmetric(double tol) const {
  return std::abs(m[1] - m[2]) <= tol * std::max(1.0, std::abs(m[1]));
}

bool Matrix2::is_positive_definite() const { return m[0] > 0.0 && determinant() > 0.0; }

Matrix2 operator*(const Matrix2& a, const Matrix2& b) {
  return {{a.m[0] * b.m[0] + a.m[1] * b.m[2], a.m[0] * b.m[1] + a.m[1] * b.m[3],
           a.m[2] * b.m[0] + a.m[3] * b.m[2], a.m[2] * b.m[1] + a.m[3] * b.m[3]}};
}

Matrix2 operator*(double s, const Matrix2& a) { return {{s * a.m[0], s * a.m[1], s * a.m[2], s * a.m[3]}}; }

Matrix2 cholesky2(const Matrix2& cov) {
  if (!cov.is_symmetric()) fail(ErrorKind::Decomposition, "cholesky2 input is not symmetric");
  if (!(cov.m[0] > 0.0)) fail(ErrorKind::Decomposition, "cholesky2 input is not positive definite");
  const double l00 = std::sqrt(cov.m[0]);
  const double l10 = cov.m[2] / l00;
  const double rest = cov.m[3] - l10 * l10;
  if (!(rest > 0.0)) fail(ErrorKind::Decomposition, "cholesky2 input is not positive definite");
  return {{l00, 0.0, l10, std::sqrt(rest)}};
}

}  // namespace qsurf
