#include "rscat/spectral.hpp"

#include <cmath>

#include "rscat/fft.hpp"

namespace rscat {

ComplexField apply_radial_multiplier(const ComplexField& field,
                                     const std::function<double(double)>& symbol) {
  const GridSpec& g = field.grid();
  const auto& d = g.dims();
  std::vector<Complex> data(field.values().begin(), field.values().end());
  detail::dft_inplace(data, d, true);
  const double scale = 1.0 / static_cast<double>(g.size());
  std::size_t idx = 0;
  for (std::size_t i = 0; i < d[0]; ++i) {
    const double xi = axis_frequency(i, d[0], g.spacing());
    for (std::size_t j = 0; j < d[1]; ++j) {
      const double eta = axis_frequency(j, d[1], g.spacing());
      for (std::size_t l = 0; l < d[2]; ++l, ++idx) {
        const double zeta = axis_frequency(l, d[2], g.spacing());
        data[idx] *= symbol(std::sqrt(xi * xi + eta * eta + zeta * zeta)) * scale;
      }
    }
  }
  detail::dft_inplace(data, d, false);
  return ComplexField(g, std::move(data));
}

ComplexField fractional_laplacian(const ComplexField& field, double exponent) {
  if (exponent == 0.0) return field;
  return apply_radial_multiplier(field, [exponent](double rho) {
    if (rho == 0.0) return 0.0;
    return std::pow(rho, exponent);
  });
}

}  // namespace rscat
