#include "rscat/shapes.hpp"

#include <cmath>

namespace rscat {

ScalarField gaussian_bump(const GridSpec& grid, Vec3 center, double amplitude, double width,
                          double cutoff_sigmas) {
  if (!(width > 0.0)) throw ConfigError("gaussian bump width must be positive");
  ScalarField out(grid);
  const double cutoff2 = (cutoff_sigmas * width) * (cutoff_sigmas * width);
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    const Vec3 d = grid.position(idx) - center;
    const double r2 = dot(d, d);
    if (r2 <= cutoff2) out[idx] = amplitude * std::exp(-r2 / (2.0 * width * width));
  }
  return out;
}

ScalarField ball_indicator(const GridSpec& grid, Vec3 center, double radius, double amplitude) {
  if (!(radius > 0.0)) throw ConfigError("ball radius must be positive");
  ScalarField out(grid);
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    const Vec3 d = grid.position(idx) - center;
    if (dot(d, d) <= radius * radius) out[idx] = amplitude;
  }
  return out;
}

ScalarField discrete_delta(const GridSpec& grid, Vec3 p) {
  const auto node = grid.nearest_node(p);
  if (!node) throw ConfigError("delta location outside the grid");
  ScalarField out(grid);
  out.at((*node)[0], (*node)[1], (*node)[2]) = 1.0 / grid.cell_volume();
  return out;
}

}  // namespace rscat
