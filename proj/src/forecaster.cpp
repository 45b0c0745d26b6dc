#include "qsurf/forecaster.hpp"

#include "qsurf/error.hpp"

namespace qsurf {

QuantileSurfaceForecast make_surface(const DirectionalQuantileModel& model, std::span<const double> origin,
                                     std::span<const double> features, const std::vector<Vec>& directions) {
  QuantileSurfaceForecast surface;
  surface.origin.assign(origin.begin(), origin.end());
  surface.levels = model.levels();
  surface.directions = directions;
  const std::size_t levels = surface.levels.size();
  const std::size_t dirs = directions.size();
  surface.radii.assign(levels * dirs, 0.0);
  std::vector<double> column(levels);
  for (std::size_t j = 0; j < dirs; ++j) {
    if (directions[j].size() != origin.size()) fail(ErrorKind::DimensionMismatch, "direction dimension mismatch");
    model.radii(directions[j], features, column);
    for (std::size_t l = 0; l < levels; ++l) surface.radius(l, j) = column[l];
  }
  return surface;
}

}  // namespace qsurf
