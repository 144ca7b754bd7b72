#include "rscat/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rscat/error.hpp"

namespace rscat {

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

GridSpec::GridSpec(Dims dims, Vec3 origin, double spacing)
    : dims_(dims), origin_(origin), spacing_(spacing) {
  for (int a = 0; a < 3; ++a) {
    if (dims_[a] < 8 || !is_power_of_two(dims_[a])) {
      throw ConfigError("grid dimension " + std::to_string(dims_[a]) +
                        " must be a power of two >= 8");
    }
  }
  if (!(spacing_ > 0.0) || !std::isfinite(spacing_)) {
    throw ConfigError("grid spacing must be positive and finite");
  }
  if (!std::isfinite(origin_.x) || !std::isfinite(origin_.y) || !std::isfinite(origin_.z)) {
    throw ConfigError("grid origin must be finite");
  }
}

double GridSpec::nyquist() const noexcept { return std::numbers::pi / spacing_; }

Index3 GridSpec::unflatten(std::size_t idx) const noexcept {
  const std::size_t l = idx % dims_[2];
  const std::size_t rest = idx / dims_[2];
  return {rest / dims_[1], rest % dims_[1], l};
}

Vec3 GridSpec::position(std::size_t i, std::size_t j, std::size_t l) const noexcept {
  return {origin_.x + spacing_ * static_cast<double>(i), origin_.y + spacing_ * static_cast<double>(j),
          origin_.z + spacing_ * static_cast<double>(l)};
}

Vec3 GridSpec::position(std::size_t idx) const noexcept {
  const auto [i, j, l] = unflatten(idx);
  return position(i, j, l);
}

std::optional<Index3> GridSpec::nearest_node(const Vec3& p) const noexcept {
  Index3 out{};
  for (int a = 0; a < 3; ++a) {
    const double t = (p[a] - origin_[a]) / spacing_;
    if (!(t > 0.0) || !(t < static_cast<double>(dims_[a] - 1))) return std::nullopt;
    out[a] = static_cast<std::size_t>(std::lround(t));
  }
  return out;
}

bool GridSpec::in_collar(std::size_t idx, std::size_t cells) const noexcept {
  const Index3 ijk = unflatten(idx);
  for (int a = 0; a < 3; ++a) {
    if (ijk[a] < cells || ijk[a] + cells >= dims_[a]) return true;
  }
  return false;
}

}  // namespace rscat
