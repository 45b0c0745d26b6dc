#pragma once

#include <span>
#include <vector>

#include "qsurf/directional.hpp"

namespace qsurf {

/// Anything that issues directional quantiles: for a unit direction and a
/// feature vector, one nonnegative radius per level, nondecreasing in level.
class DirectionalQuantileModel {
 public:
  virtual ~DirectionalQuantileModel() = default;

  virtual const std::vector<double>& levels() const = 0;
  virtual void radii(std::span<const double> direction, std::span<const double> features,
                     std::span<double> out) const = 0;

  std::vector<double> radii(std::span<const double> direction, std::span<const double> features) const {
    std::vector<double> out(levels().size());
    radii(direction, features, out);
    return out;
  }
};

/// Evaluates the model along every direction of a grid.
QuantileSurfaceForecast make_surface(const DirectionalQuantileModel& model, std::span<const double> origin,
                                     std::span<const double> features, const std::vector<Vec>& directions);

}  // namespace qsurf
