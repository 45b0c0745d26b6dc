#pragma once

#include <span>
#include <vector>

#include "qsurf/dataset.hpp"
#include "qsurf/directional.hpp"
#include "qsurf/forecaster.hpp"

namespace qsurf {

struct ReliabilityPoint {
  double level = 0.0;
  double frequency = 0.0;
};
using ReliabilityCurve = std::vector<ReliabilityPoint>;

struct SharpnessPoint {
  double coverage = 0.0;  // 1 - alpha
  double mean_area = 0.0;
};
using SharpnessCurve = std::vector<SharpnessPoint>;

/// Nondecreasing CDF of the vector length given by anchors (x_k, p_k):
/// zero below x_0, linear between anchors, one from the last anchor on.
/// Quantile forecasts use anchors (0, 0), (q_1, tau_1), ..., (q_L, tau_L).
class DirectionalCdf {
 public:
  struct Anchor {
    double length;
    double probability;
  };

  explicit DirectionalCdf(std::vector<Anchor> anchors);

  /// Unit step at `length`.
  static DirectionalCdf step(double length);

  double operator()(double length) const;

  const std::vector<Anchor>& anchors() const { return anchors_; }

 private:
  std::vector<Anchor> anchors_;
};

/// Throws ContractViolation if radii decrease across levels.
DirectionalCdf build_directional_cdf(std::span<const double> levels, std::span<const double> radii);

/// Exact integral of (F(y) - H(y - length))^2 over y >= 0, segment by segment.
double directional_crps(const DirectionalCdf& cdf, double observed_length);

double skill(double eval_score, double base_score);

/// Each sample seen from its own point estimate: direction, length, and the
/// model's sorted radii at that direction.
struct DirectionalEvaluation {
  std::size_t levels = 0;
  std::vector<Vec> directions;
  std::vector<double> lengths;
  std::vector<double> radii;  // N x levels

  std::size_t size() const { return lengths.size(); }
  std::span<const double> radii_at(std::size_t i) const {
    return std::span<const double>(radii).subspan(i * levels, levels);
  }
};

/// Zero-length observations take the first axis as their direction.
DirectionalEvaluation evaluate_directions(const DirectionalQuantileModel& model, const Dataset& data,
                                          const std::vector<Vec>& point_estimates);

/// Fraction of samples whose length does not exceed the radius (H(0) = 1).
double coverage(std::span<const double> radii, std::span<const double> lengths);
double coverage(const DirectionalQuantileModel& model, const Dataset& data, const std::vector<Vec>& point_estimates,
                double tau);

ReliabilityCurve reliability_curve(const DirectionalEvaluation& eval, std::span<const double> levels);
ReliabilityCurve reliability_curve(const DirectionalQuantileModel& model, const Dataset& data,
                                   const std::vector<Vec>& point_estimates);

/// Mean polygon area at level 1 - alpha for each alpha. The level must be
/// present in every surface; there is no interpolation.
SharpnessCurve sharpness_curve(std::span<const QuantileSurfaceForecast> surfaces, std::span<const double> alphas);

struct SampleScore {
  std::size_t sample = 0;
  double angle = 0.0;
  double length = 0.0;
  double crps = 0.0;
};

std::vector<SampleScore> directional_crps_scores(const DirectionalEvaluation& eval, std::span<const double> levels);
double average_directional_crps(std::span<const SampleScore> scores);
double average_directional_crps(const DirectionalQuantileModel& model, const Dataset& data,
                                const std::vector<Vec>& point_estimates);

}  // namespace qsurf
