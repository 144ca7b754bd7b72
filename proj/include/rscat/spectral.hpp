#pragma once

#include <functional>

#include "rscat/field.hpp"

namespace rscat {

/// Applies the Fourier multiplier sym(|ξ|) to a field on its periodic box.
ComplexField apply_radial_multiplier(const ComplexField& field,
                                     const std::function<double(double)>& symbol);

/// Fractional Laplacian with symbol |ξ|^exponent, i.e. (-Δ)^{exponent/2}.
/// For negative exponents the singular ξ = 0 bin is set to zero; exponent 0
/// is the identity.
ComplexField fractional_laplacian(const ComplexField& field, double exponent);

}  // namespace rscat
