#pragma once

#include <cstdint>
#include <vector>

#include "rscat/field.hpp"
#include "rscat/migr.hpp"

// Brute-force reference values, written independently of the FFT-based code
// they are used to check.
namespace rscat::oracles {

struct QuadratureSpec {
  double rel_tol = 1e-8;
  std::size_t max_evals = 50'000'000;
  std::vector<double> damping;  // ε schedule, strictly decreasing to ≤ 1e-6

  QuadratureSpec();  // ε halving from 1e-3 down past 1e-6
  void validate() const;
};

/// (2π)^{-3} ∫ e^{i r·ξ} |ξ|^{-m} dξ = (2π² r)^{-1} ∫₀^∞ sin(rρ) ρ^{1-m} dρ for m in [2, 3),
/// by Gaussian damping e^{-ερ²} and polynomial extrapolation to ε = 0.
/// Throws OracleError when the extrapolation cannot certify rel_tol.
double riesz_kernel(double m, double r, const QuadratureSpec& spec = {});

/// Γ((3-m)/2) / (2^m π^{3/2} Γ(m/2)) r^{m-3}; independent cross-check of riesz_kernel.
double riesz_kernel_closed_form(double m, double r);

/// (1/4π) Σ e^{-ik x̂·y} g(y) h³ with one complex exponential per cell.
Complex direct_farfield(const ScalarField& g, double k, const Vec3& dir);

/// Σ μ(z)/|x - z| h³; x must be at least 2h away from every nonzero cell.
double potential_kernel_integral(const ScalarField& mu, const Vec3& x);

/// Covariance of the migr law at (x, y) from n dense realizations built by
/// direct summation against a tabulated real-space kernel (grids ≤ 16³).
CovarianceEstimate brute_covariance(const MigrSpec& spec, const Vec3& x, const Vec3& y, std::size_t n,
                                    std::uint64_t seed0);

}  // namespace rscat::oracles
