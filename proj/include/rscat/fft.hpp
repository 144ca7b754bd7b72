#pragma once

#include <vector>

#include "rscat/field.hpp"

namespace rscat {

/// Angular frequency 2*pi*n/(N*h) of DFT bin `bin` along an axis of N
/// samples; bins at or above N/2 wrap to negative n.
double axis_frequency(std::size_t bin, std::size_t n, double spacing) noexcept;

/// One ξ vector per grid point, in the same row-major order as field data.
std::vector<Vec3> frequency_lattice(const GridSpec& grid);

/// Unitary 3D DFT pair (scaled by N^{-1/2} per axis, both directions).
/// Spectral fields reuse the spatial GridSpec; bin order follows
/// frequency_lattice. Physical constants such as (2π)^{-3/2} are never
/// folded in here.
ComplexField fft_forward(const ComplexField& field);
ComplexField fft_inverse(const ComplexField& spectrum);

namespace detail {

// Unnormalized in-place transforms on contiguous row-major buffers.
void dft_inplace(std::vector<Complex>& data, const Dims& dims, bool forward);

}  // namespace detail

}  // namespace rscat
