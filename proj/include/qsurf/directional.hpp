#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "qsurf/numkit.hpp"

namespace qsurf {

using Vec = std::vector<double>;

struct DirectionalObservation {
  Vec direction;  // unit norm
  double length = 0.0;
};

/// Sampled star-domain surfaces around an origin: radii(l, j) is the length
/// of the level-l surface along directions[j].
struct QuantileSurfaceForecast {
  Vec origin;
  std::vector<double> levels;
  std::vector<Vec> directions;
  std::vector<double> radii;  // levels.size() x directions.size(), row-major

  std::size_t level_count() const { return levels.size(); }
  std::size_t direction_count() const { return directions.size(); }
  double radius(std::size_t level, std::size_t dir) const { return radii[level * directions.size() + dir]; }
  double& radius(std::size_t level, std::size_t dir) { return radii[level * directions.size() + dir]; }

  /// Throws ContractViolation if any structural invariant is broken:
  /// ascending levels in (0,1), unit directions, nonnegative radii that do
  /// not cross between levels.
  void validate() const;
};

double norm(std::span<const double> v);

/// o - point_estimate
Vec forecast_adjust(std::span<const double> observation, std::span<const double> point_estimate);

/// Throws DegenerateObservation for the zero vector.
DirectionalObservation decompose(std::span<const double> adjusted);

/// `count` counterclockwise unit vectors at angles 2*pi*j/count from the first axis.
std::vector<Vec> direction_grid(int count, int dimension = 2);

/// Angle of a 2-D direction measured from the first axis, in [0, 2*pi).
double direction_angle(std::span<const double> direction);

using RadiusOracle = std::function<double(std::span<const double> direction)>;

/// Star-domain membership of `observation` in the level-`level_index` surface,
/// comparing its distance to the origin against `radius_at` evaluated at the
/// observation's own direction. The boundary is closed, and the origin itself
/// is always contained.
bool contains(const QuantileSurfaceForecast& surface, std::size_t level_index,
              std::span<const double> observation, const RadiusOracle& radius_at);

/// Membership in the sampled polygon itself (the triangle fan over the
/// direction grid). 2-D only.
bool polygon_contains(const QuantileSurfaceForecast& surface, std::size_t level_index,
                      std::span<const double> point);

/// Shoelace area of the sampled polygon at one level. 2-D only.
double polygon_area(const QuantileSurfaceForecast& surface, std::size_t level_index);

struct Box {
  Vec lower;
  Vec upper;
};

struct VolumeEstimate {
  double volume = 0.0;
  double standard_error = 0.0;
};

using MembershipPredicate = std::function<bool(std::span<const double> point)>;

/// Box volume times the fraction of uniform samples inside the set.
VolumeEstimate monte_carlo_volume(const MembershipPredicate& inside, const Box& box, std::size_t samples, Rng rng);

}  // namespace qsurf
