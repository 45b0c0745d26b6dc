#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "qsurf/error.hpp"
#include "qsurf/numkit.hpp"

using namespace qsurf;

namespace {

// Straight transcription of the public splitmix64 / xoshiro256** reference code.
struct ReferenceXoshiro {
  std::uint64_t s[4];
  explicit ReferenceXoshiro(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s) {
      std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      w = z ^ (z >> 31);
    }
  }
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t next() {
    const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }
};

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

TEST_CASE("rng matches the xoshiro256** reference stream") {
  for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0xDEADBEEFULL}) {
    Rng rng(seed);
    ReferenceXoshiro ref(seed);
    for (int i = 0; i < 1000; ++i) REQUIRE(rng.next_u64() == ref.next());
  }
}

TEST_CASE("uniform stays in [0, 1)") {
  Rng rng(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("mix_seed separates tags and seeds") {
  CHECK(mix_seed(1, 2) != mix_seed(1, 3));
  CHECK(mix_seed(1, 2) != mix_seed(2, 2));
  CHECK(mix_seed(1, 2) == mix_seed(1, 2));
}

TEST_CASE("standard normal moments") {
  Rng rng(11);
  const int n = 1'000'000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = sample_standard_normal(rng);
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(sq / n - mean * mean - 1.0) < 0.01);
}

TEST_CASE("same seed replays the first 100 normals") {
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) REQUIRE(sample_standard_normal(a) == sample_standard_normal(b));
}

TEST_CASE("exponential sampler") {
  SUBCASE("scale 4 mean") {
    Rng rng(5);
    double sum = 0.0;
    for (int i = 0; i < 1'000'000; ++i) sum += sample_exponential(rng, 4.0);
    CHECK(std::abs(sum / 1e6 - 4.0) < 0.02);
  }
  SUBCASE("nonnegative support") {
    Rng rng(6);
    for (int i = 0; i < 100000; ++i) REQUIRE(sample_exponential(rng, 1.0) >= 0.0);
  }
  SUBCASE("scale 2 median") {
    Rng rng(7);
    std::vector<double> draws(1'000'000);
    for (auto& d : draws) d = sample_exponential(rng, 2.0);
    std::nth_element(draws.begin(), draws.begin() + 500000, draws.end());
    CHECK(std::abs(draws[500000] - 2.0 * std::log(2.0)) < 0.01);
  }
  SUBCASE("nonpositive scale") {
    Rng rng(8);
    CHECK_THROWS_AS(sample_exponential(rng, 0.0), Error);
    CHECK_THROWS_AS(sample_exponential(rng, -1.0), Error);
  }
}

TEST_CASE("chi2 cdf") {
  CHECK(chi2_cdf(0.0, 2) == 0.0);
  CHECK(std::abs(chi2_cdf(4.60517, 2) - 0.9) < 1e-6);
  CHECK(std::abs(chi2_cdf(-2.0 * std::log(0.1), 2) - 0.9) < 1e-9);
  for (double x = 0.0; x <= 20.0; x += 0.25) {
    CHECK(std::abs(chi2_cdf(x, 1) - (2.0 * normal_cdf(std::sqrt(x)) - 1.0)) < 1e-9);
    CHECK(std::abs(chi2_cdf(x, 2) - (1.0 - std::exp(-x / 2.0))) < 1e-12);
  }
  try {
    chi2_cdf(-1.0, 2);
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
  double prev = -1.0;
  for (double x = 0.0; x < 30.0; x += 0.1) {
    const double p = chi2_cdf(x, 3);
    REQUIRE(p >= prev);
    prev = p;
  }
}

TEST_CASE("chi2 inverse cdf") {
  CHECK(std::abs(chi2_inverse_cdf(0.9, 2) - 4.605170185988091) < 1e-8);
  CHECK(std::abs(chi2_inverse_cdf(0.5, 2) - 1.3862943611198906) < 1e-8);
  for (int k : {1, 2, 3, 5}) {
    double prev = 0.0;
    for (int i = 1; i <= 99; ++i) {
      const double tau = i / 100.0;
      const double x = chi2_inverse_cdf(tau, k);
      REQUIRE(x > prev);
      prev = x;
      REQUIRE(std::abs(chi2_cdf(x, k) - tau) < 1e-9);
    }
  }
  for (double bad : {0.0, 1.0, -0.1, 1.5}) {
    try {
      chi2_inverse_cdf(bad, 2);
      FAIL("expected a domain error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Domain);
    }
  }
}

TEST_CASE("cholesky2") {
  CHECK(cholesky2(Matrix2::identity()) == Matrix2::identity());
  const Matrix2 l = cholesky2(Matrix2::diagonal(0.5, 2.0));
  CHECK(std::abs(l(0, 0) - std::sqrt(0.5)) < 1e-15);
  CHECK(std::abs(l(1, 1) - std::sqrt(2.0)) < 1e-15);
  CHECK(l(0, 1) == 0.0);
  CHECK(l(1, 0) == 0.0);

  Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    // A A^T + eps I is SPD.
    Matrix2 a{{sample_uniform(rng, -2, 2), sample_uniform(rng, -2, 2), sample_uniform(rng, -2, 2),
               sample_uniform(rng, -2, 2)}};
    Matrix2 cov = a * a.transposed();
    cov(0, 0) += 0.1;
    cov(1, 1) += 0.1;
    const Matrix2 c = cholesky2(cov);
    REQUIRE(c(0, 1) == 0.0);
    REQUIRE(c(0, 0) > 0.0);
    REQUIRE(c(1, 1) > 0.0);
    const Matrix2 back = c * c.transposed();
    for (int k = 0; k < 4; ++k) REQUIRE(std::abs(back.m[k] - cov.m[k]) < 1e-12);
  }
  try {
    cholesky2(Matrix2{{1.0, 2.0, 2.0, 1.0}});
    FAIL("expected a decomposition error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Decomposition);
  }
}

TEST_CASE("matrix helpers") {
  const Matrix2 m{{4.0, 1.0, 1.0, 3.0}};
  const Matrix2 inv = m.inverse();
  const Matrix2 prod = m * inv;
  CHECK(std::abs(prod(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(prod(0, 1)) < 1e-15);
  CHECK(m.determinant() == 11.0);
  CHECK(m.trace() == 7.0);
  CHECK(m.quadratic_form(1.0, 2.0) == 4.0 + 4.0 + 12.0);
  CHECK(m.is_symmetric());
  CHECK(m.is_positive_definite());
  CHECK_FALSE(Matrix2({1.0, 0.0, 0.0, -1.0}).is_positive_definite());
  CHECK_THROWS_AS(Matrix2({1.0, 2.0, 2.0, 4.0}).inverse(), Error);
}
