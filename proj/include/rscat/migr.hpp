#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rscat/field.hpp"

namespace rscat {

/// Law of a microlocally isotropic Gaussian random field whose covariance
/// has principal symbol strength(x) |ξ|^{-order}.
struct MigrSpec {
  double order = 0.0;      // m; admissible set {0} ∪ [2, 4)
  ScalarField strength;    // μ ≥ 0, compactly supported
  ScalarField mean;        // 𝔼f, compactly supported
  std::size_t collar_cells = 4;

  MigrSpec(double m, ScalarField mu, ScalarField mean_field, std::size_t collar = 4);
  MigrSpec(double m, ScalarField mu);  // zero mean

  const GridSpec& grid() const noexcept { return strength.grid(); }

  /// Throws ConfigError on any violated invariant.
  void validate() const;

  /// Stable 64-bit fingerprint of order, grid, strength and mean.
  std::uint64_t fingerprint() const;
};

struct Realization {
  ScalarField field;
  std::uint64_t seed = 0;
  double order = 0.0;
  std::uint64_t spec_fingerprint = 0;
};

/// f = mean + sqrt(μ) · F^{-1}[ |ξ|^{-m/2} F W ], W white noise of variance
/// h^{-3} per node. Pure function of (spec, seed).
Realization synthesize_migr(const MigrSpec& spec, std::uint64_t seed);

/// Seed of the i-th sample of an ensemble starting at seed0.
constexpr std::uint64_t sample_seed(std::uint64_t seed0, std::size_t i) noexcept { return seed0 + i; }

struct PointPair {
  Vec3 x;
  Vec3 y;
};

struct CovarianceEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Monte-Carlo average of (f(x)-𝔼f(x))(f(y)-𝔼f(y)) over seeds
/// seed0 .. seed0+n-1, sampled at the nodes nearest to each point.
std::vector<CovarianceEstimate> empirical_covariance(const MigrSpec& spec,
                                                     const std::vector<PointPair>& pairs,
                                                     std::size_t n_samples, std::uint64_t seed0);

struct SlopeFit {
  double slope = 0.0;
  double half_width = 0.0;  // 95% confidence
  std::size_t bins = 0;
};

/// Least-squares slope of the log radially binned ensemble power spectrum
/// of f - 𝔼f against log|ξ| over [Nyquist/40, Nyquist/4].
SlopeFit spectral_slope(const MigrSpec& spec, std::size_t n_samples, std::uint64_t seed0);

}  // namespace rscat
