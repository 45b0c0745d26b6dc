#include "qsurf/directional.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qsurf/error.hpp"

namespace qsurf {

void QuantileSurfaceForecast::validate() const {
  const std::size_t dims = origin.size();
  for (std::size_t l = 0; l < levels.size(); ++l) {
    if (!(levels[l] > 0.0 && levels[l] < 1.0)) fail(ErrorKind::ContractViolation, "surface level outside (0,1)");
    if (l > 0 && !(levels[l] > levels[l - 1])) fail(ErrorKind::ContractViolation, "surface levels not ascending");
  }
  for (const auto& u : directions) {
    if (u.size() != dims) fail(ErrorKind::ContractViolation, "direction dimension differs from origin");
    if (std::abs(norm(u) - 1.0) > 1e-9) fail(ErrorKind::ContractViolation, "direction is not a unit vector");
  }
  if (radii.size() != levels.size() * directions.size()) fail(ErrorKind::ContractViolation, "radii shape mismatch");
  for (std::size_t j = 0; j < directions.size(); ++j) {
    for (std::size_t l = 0; l < levels.size(); ++l) {
      if (!(radius(l, j) >= 0.0)) fail(ErrorKind::ContractViolation, "negative or NaN radius");
      if (l > 0 && radius(l, j) < radius(l - 1, j)) fail(ErrorKind::ContractViolation, "quantile crossing");
    }
  }
}

double norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

Vec forecast_adjust(std::span<const double> observation, std::span<const double> point_estimate) {
  if (observation.size() != point_estimate.size()) {
    fail(ErrorKind::DimensionMismatch, "observation has " + std::to_string(observation.size()) +
                                           " components, point estimate " + std::to_string(point_estimate.size()));
  }
  Vec out(observation.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = observation[k] - point_estimate[k];
  return out;
}

DirectionalObservation decompose(std::span<const double> adjusted) {
  const double length = norm(adjusted);
  if (!(length > 0.0)) fail(ErrorKind::DegenerateObservation, "zero-length observation has no direction");
  DirectionalObservation out;
  out.length = length;
  out.direction.resize(adjusted.size());
  for (std::size_t k = 0; k < adjusted.size(); ++k) out.direction[k] = adjusted[k] / length;
  return out;
}

std::vector<Vec> direction_grid(int count, int dimension) {
  if (dimension != 2) fail(ErrorKind::UnsupportedDimension, "direction grids are 2-D only");
  if (count < 3) fail(ErrorKind::InvalidParameter, "direction grid needs at least 3 directions");
  std::vector<Vec> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    const double angle = 2.0 * std::numbers::pi * j / count;
    grid.push_back({std::cos(angle), std::sin(angle)});
  }
  return grid;
}

double direction_angle(std::span<const double> direction) {
  if (direction.size() != 2) fail(ErrorKind::UnsupportedDimension, "angles are defined for 2-D directions");
  double angle = std::atan2(direction[1], direction[0]);
  if (angle < 0.0) angle += 2.0 * std::numbers::pi;
  return angle;
}

bool contains(const QuantileSurfaceForecast& surface, std::size_t level_index, std::span<const double> observation,
              const RadiusOracle& radius_at) {
  if (level_index >= surface.level_count()) fail(ErrorKind::InvalidParameter, "level index out of range");
  const Vec adjusted = forecast_adjust(observation, surface.origin);
  const double length = norm(adjusted);
  if (length == 0.0) return true;
  const DirectionalObservation obs = decompose(adjusted);
  // H(0) = 1: the surface itself is inside.
  return radius_at(obs.direction) - obs.length >= 0.0;
}

namespace {

void require_planar(const QuantileSurfaceForecast& surface, std::size_t level_index) {
  if (surface.origin.size() != 2) fail(ErrorKind::UnsupportedDimension, "exact area is 2-D only");
  if (surface.direction_count() < 3) fail(ErrorKind::InvalidParameter, "polygon needs at least 3 directions");
  if (level_index >= surface.level_count()) fail(ErrorKind::InvalidParameter, "level index out of range");
}

}  // namespace

double polygon_area(const QuantileSurfaceForecast& surface, std::size_t level_index) {
  require_planar(surface, level_index);
  // Vertices relative to the origin; translation does not change the area.
  const std::size_t n = surface.direction_count();
  double twice_area = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t next = (j + 1) % n;
    const double r0 = surface.radius(level_index, j);
    const double r1 = surface.radius(level_index, next);
    const auto& u0 = surface.directions[j];
    const auto& u1 = surface.directions[next];
    twice_area += r0 * r1 * (u0[0] * u1[1] - u1[0] * u0[1]);
  }
  return 0.5 * std::abs(twice_area);
}

bool polygon_contains(const QuantileSurfaceForecast& surface, std::size_t level_index, std::span<const double> point) {
  require_planar(surface, level_index);
  const double px = point[0] - surface.origin[0];
  const double py = point[1] - surface.origin[1];
  if (px == 0.0 && py == 0.0) return true;
  const std::size_t n = surface.direction_count();
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t next = (j + 1) % n;
    const auto& u0 = surface.directions[j];
    const auto& u1 = surface.directions[next];
    // Point lies in the angular sector spanned by u0 -> u1 (counterclockwise).
    const double c0 = u0[0] * py - u0[1] * px;
    const double c1 = px * u1[1] - py * u1[0];
    if (c0 < 0.0 || c1 < 0.0) continue;
    const double ax = surface.radius(level_index, j) * u0[0];
    const double ay = surface.radius(level_index, j) * u0[1];
    const double bx = surface.radius(level_index, next) * u1[0];
    const double by = surface.radius(level_index, next) * u1[1];
    // Same side of edge a->b as the origin (origin is on the left for ccw order).
    const double edge = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
    return edge >= 0.0;
  }
  return false;
}

VolumeEstimate monte_carlo_volume(const MembershipPredicate& inside, const Box& box, std::size_t samples, Rng rng) {
  if (samples == 0) fail(ErrorKind::InvalidParameter, "monte_carlo_volume needs at least one sample");
  if (box.lower.size() != box.upper.size() || box.lower.empty()) {
    fail(ErrorKind::InvalidParameter, "bounding box corners must share a nonzero dimension");
  }
  double box_volume = 1.0;
  for (std::size_t k = 0; k < box.lower.size(); ++k) {
    const double extent = box.upper[k] - box.lower[k];
    if (!(extent > 0.0) || !std::isfinite(extent)) fail(ErrorKind::InvalidParameter, "degenerate bounding box");
    box_volume *= extent;
  }
  Vec point(box.lower.size());
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t k = 0; k < point.size(); ++k) point[k] = sample_uniform(rng, box.lower[k], box.upper[k]);
    if (inside(point)) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {box_volume * p, box_volume * std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

}  // namespace qsurf
