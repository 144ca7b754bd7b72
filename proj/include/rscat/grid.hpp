#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "rscat/vec3.hpp"

namespace rscat {

using Dims = std::array<std::size_t, 3>;
using Index3 = std::array<std::size_t, 3>;

/// Uniform isotropic sampling of a box. Node (i,j,l) sits at
/// origin + h*(i,j,l); the box side along each axis is dims[a]*h.
/// Every dimension is a power of two no smaller than 8.
class GridSpec {
 public:
  GridSpec(Dims dims, Vec3 origin, double spacing);

  const Dims& dims() const noexcept { return dims_; }
  const Vec3& origin() const noexcept { return origin_; }
  double spacing() const noexcept { return spacing_; }
  std::size_t size() const noexcept { return dims_[0] * dims_[1] * dims_[2]; }
  double side(int axis) const noexcept { return static_cast<double>(dims_[axis]) * spacing_; }
  double cell_volume() const noexcept { return spacing_ * spacing_ * spacing_; }
  double nyquist() const noexcept;

  std::size_t flat(std::size_t i, std::size_t j, std::size_t l) const noexcept {
    return (i * dims_[1] + j) * dims_[2] + l;
  }
  Index3 unflatten(std::size_t idx) const noexcept;
  Vec3 position(std::size_t i, std::size_t j, std::size_t l) const noexcept;
  Vec3 position(std::size_t idx) const noexcept;

  /// Nearest node to p, if p lies strictly inside the span of the nodes.
  std::optional<Index3> nearest_node(const Vec3& p) const noexcept;

  /// Cells whose distance to the box faces is below `cells` count as collar.
  bool in_collar(std::size_t idx, std::size_t cells) const noexcept;

  bool operator==(const GridSpec&) const = default;

 private:
  Dims dims_;
  Vec3 origin_;
  double spacing_;
};

bool is_power_of_two(std::size_t n) noexcept;

}  // namespace rscat
