#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "rscat/error.hpp"
#include "rscat/grid.hpp"

namespace rscat {

using Complex = std::complex<double>;

namespace detail {
inline bool is_finite(double v) { return std::isfinite(v); }
inline bool is_finite(const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }
}  // namespace detail

/// Row-major samples of a function on a GridSpec.
template <class T>
class Field {
 public:
  using value_type = T;

  explicit Field(GridSpec grid) : grid_(std::move(grid)), data_(grid_.size(), T{}) {}

  Field(GridSpec grid, std::vector<T> data) : grid_(std::move(grid)), data_(std::move(data)) {
    if (data_.size() != grid_.size()) {
      throw ConfigError("field data length " + std::to_string(data_.size()) +
                        " does not match grid size " + std::to_string(grid_.size()));
    }
    for (const auto& v : data_) {
      if (!detail::is_finite(v)) throw ConfigError("field data contains a non-finite value");
    }
  }

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<const T> values() const noexcept { return data_; }
  std::span<T> values() noexcept { return data_; }
  const std::vector<T>& vector() const noexcept { return data_; }

  const T& operator[](std::size_t idx) const noexcept { return data_[idx]; }
  T& operator[](std::size_t idx) noexcept { return data_[idx]; }

  const T& at(std::size_t i, std::size_t j, std::size_t l) const noexcept {
    return data_[grid_.flat(i, j, l)];
  }
  T& at(std::size_t i, std::size_t j, std::size_t l) noexcept { return data_[grid_.flat(i, j, l)]; }

 private:
  GridSpec grid_;
  std::vector<T> data_;
};

using ScalarField = Field<double>;
using ComplexField = Field<Complex>;

ComplexField to_complex(const ScalarField& f);

double l2_norm(std::span<const double> v);
double l2_norm(std::span<const Complex> v);

/// True when every value in the outer `cells`-wide shell of the grid is zero.
bool vanishes_on_collar(const ScalarField& f, std::size_t cells);
bool vanishes_on_collar(const ComplexField& f, std::size_t cells);

/// Axis-aligned bounding box of the nonzero cells (node coordinates).
struct SupportBox {
  bool empty = true;
  Vec3 lo;
  Vec3 hi;
};

SupportBox support_box(const ScalarField& f);

}  // namespace rscat
