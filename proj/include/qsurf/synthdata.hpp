#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "qsurf/dataset.hpp"
#include "qsurf/gaussian.hpp"
#include "qsurf/numkit.hpp"

namespace qsurf {

enum class SyntheticKind { Mgd, Smd, Cmgd };

std::string to_string(SyntheticKind kind);
SyntheticKind synthetic_kind_from_string(const std::string& name);

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::Mgd;
  std::size_t train_count = 1000;
  std::size_t test_count = 1000;
  std::uint64_t seed = 0;
};

struct SyntheticSplit {
  Dataset train;
  Dataset test;
};

/// Zero-mean bivariate Gaussian, variances 0.5 and 2, uncorrelated.
Dataset gen_mgd(Rng& rng, std::size_t n);
/// (Normal(1, 3), Exponential(scale 4)) rotated 45 degrees counterclockwise.
Dataset gen_smd(Rng& rng, std::size_t n);
/// Binary feature alternating 0,1,0,1,...; feature 0 -> diag(0.5, 7.5),
/// feature 1 -> diag(5.0, 0.5). n must be even.
Dataset gen_cmgd(Rng& rng, std::size_t n);

Dataset generate(SyntheticKind kind, Rng& rng, std::size_t n);
enum class SplitKind { Train, Test };

/// Train and test sets drawn from independent sub-streams of spec.seed.
SyntheticSplit generate(const SyntheticSpec& spec);
/// One side of generate(spec), with the same stream.
Dataset generate(const SyntheticSpec& spec, SplitKind split);

/// Generating covariance for the Gaussian kinds. SMD throws Unsupported.
Matrix2 true_covariance(SyntheticKind kind, std::span<const double> features);

double true_directional_quantile(SyntheticKind kind, std::span<const double> features,
                                 std::span<const double> direction, double tau);

/// Directional quantiles of the data-generating process (MGD and CMGD).
GaussianQuantileModel true_quantile_model(SyntheticKind kind, std::vector<double> levels);

}  // namespace qsurf
