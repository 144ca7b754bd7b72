#include "rscat/field.hpp"

#include <algorithm>

namespace rscat {

ComplexField to_complex(const ScalarField& f) {
  ComplexField out(f.grid());
  std::ranges::transform(f.values(), out.values().begin(), [](double v) { return Complex(v, 0.0); });
  return out;
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double l2_norm(std::span<const Complex> v) {
  double s = 0.0;
  for (const Complex& x : v) s += std::norm(x);
  return std::sqrt(s);
}

namespace {

template <class T>
bool collar_zero(const Field<T>& f, std::size_t cells) {
  const GridSpec& g = f.grid();
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    if (f[idx] != T{} && g.in_collar(idx, cells)) return false;
  }
  return true;
}

}  // namespace

bool vanishes_on_collar(const ScalarField& f, std::size_t cells) { return collar_zero(f, cells); }
bool vanishes_on_collar(const ComplexField& f, std::size_t cells) { return collar_zero(f, cells); }

SupportBox support_box(const ScalarField& f) {
  SupportBox box;
  const GridSpec& g = f.grid();
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    if (f[idx] == 0.0) continue;
    const Vec3 p = g.position(idx);
    if (box.empty) {
      box = {false, p, p};
      continue;
    }
    box.lo = {std::min(box.lo.x, p.x), std::min(box.lo.y, p.y), std::min(box.lo.z, p.z)};
    box.hi = {std::max(box.hi.x, p.x), std::max(box.hi.y, p.y), std::max(box.hi.z, p.z)};
  }
  return box;
}

}  // namespace rscat
