#pragma once

#include "rscat/field.hpp"

namespace rscat {

/// amplitude * exp(-|x-c|^2 / (2 width^2)), set to zero beyond
/// cutoff_sigmas * width so the support is compact.
ScalarField gaussian_bump(const GridSpec& grid, Vec3 center, double amplitude, double width,
                          double cutoff_sigmas = 4.0);

/// amplitude on |x-c| <= radius, zero elsewhere.
ScalarField ball_indicator(const GridSpec& grid, Vec3 center, double radius, double amplitude);

/// Unit-mass discrete delta (value 1/h^3) at the node nearest to p.
ScalarField discrete_delta(const GridSpec& grid, Vec3 p);

}  // namespace rscat
