#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace qsurf {

/// Seeded xoshiro256** generator. The 256-bit state is expanded from the
/// 64-bit seed with splitmix64, so equal seeds give equal streams on every
/// platform. Not thread-safe; each task owns its own instance.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  friend double sample_standard_normal(Rng& rng);

  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_{};
  std::optional<double> spare_normal_;
};

/// Derives an independent sub-seed from a base seed and a tag.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

/// Box-Muller; the second variate of each pair is cached in the Rng.
double sample_standard_normal(Rng& rng);
double sample_exponential(Rng& rng, double scale);
double sample_uniform(Rng& rng, double lo, double hi);

/// P(dof/2, x/2), the regularized lower incomplete gamma function.
double chi2_cdf(double x, int dof);
double chi2_inverse_cdf(double tau, int dof);

/// 2x2 matrix stored row-major: {m00, m01, m10, m11}.
struct Matrix2 {
  std::array<double, 4> m{1.0, 0.0, 0.0, 1.0};

  static Matrix2 identity() { return {}; }
  static Matrix2 diagonal(double a, double b) { return {{a, 0.0, 0.0, b}}; }

  double operator()(int row, int col) const { return m[static_cast<std::size_t>(row * 2 + col)]; }
  double& operator()(int row, int col) { return m[static_cast<std::size_t>(row * 2 + col)]; }

  double determinant() const { return m[0] * m[3] - m[1] * m[2]; }
  double trace() const { return m[0] + m[3]; }
  Matrix2 transposed() const { return {{m[0], m[2], m[1], m[3]}}; }
  /// Throws SingularCovariance when the determinant vanishes.
  Matrix2 inverse() const;
  /// x^T M x
  double quadratic_form(double x0, double x1) const {
    return m[0] * x0 * x0 + (m[1] + m[2]) * x0 * x1 + m[3] * x1 * x1;
  }

  bool is_symmetric(double tol = 1e-12) const;
  bool is_positive_definite() const;

  friend Matrix2 operator*(const Matrix2& a, const Matrix2& b);
  friend Matrix2 operator*(double s, const Matrix2& a);
  friend bool operator==(const Matrix2&, const Matrix2&) = default;
};

/// Lower-triangular L with L L^T = cov. Throws Decomposition otherwise.
Matrix2 cholesky2(const Matrix2& cov);

}  // namespace qsurf
