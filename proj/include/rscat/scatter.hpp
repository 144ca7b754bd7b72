#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "rscat/farfield_set.hpp"
#include "rscat/field.hpp"
#include "rscat/migr.hpp"

namespace rscat {

/// Outgoing fundamental solution of -Δ - k², e^{ikr}/(4πr).
Complex fundamental_solution(double k, double r);

/// Integral of the fundamental solution over a ball of radius rho centred on
/// its singularity: (e^{ikρ}(1 - ikρ) - 1)/k², and ρ²/2 at k = 0.
Complex ball_integral(double k, double rho);

/// Radius of the ball with the volume of one grid cell.
double equal_volume_radius(double spacing);

/// Discrete volume potential (R_k φ)(x) = ∫ Φ_k(x,y) φ(y) dy on a grid.
/// Off-centre cells use Φ_k at node offsets times h³; the self cell uses
/// the equal-volume ball integral. Applied as an aperiodic convolution on a
/// grid zero-padded to twice the size along each axis.
class Resolvent {
 public:
  Resolvent(const GridSpec& grid, double k, std::size_t collar_cells = 4);

  double k() const noexcept { return k_; }
  const GridSpec& grid() const noexcept { return grid_; }

  /// Throws ConfigError unless phi vanishes on the collar.
  ComplexField apply(const ComplexField& phi) const;

 private:
  ComplexField convolve(const ComplexField& phi) const;

  GridSpec grid_;
  double k_;
  std::size_t collar_;
  Dims padded_;
  std::vector<Complex> kernel_hat_;
};

ComplexField resolvent_apply(double k, const ComplexField& phi);

/// e^{ik d·x} sampled at the grid nodes.
ComplexField incident_plane_wave(double k, const Vec3& d, const GridSpec& grid);

/// One time-harmonic problem (-Δ - k² - q) u = f with u = α u^in + u^sc.
struct ScatteringConfig {
  explicit ScatteringConfig(GridSpec g) : grid(std::move(g)) {}

  GridSpec grid;
  double k = 1.0;
  int alpha = 0;
  Vec3 direction{0.0, 0.0, 1.0};
  std::optional<ScalarField> potential;
  std::optional<ScalarField> source;
  int max_born_order = 20;
  double tol = 1e-10;
  std::size_t collar_cells = 4;

  void validate() const;
};

struct ConvergenceReport {
  std::vector<double> updates;  // relative update norm per iteration
  double contraction = 0.0;     // ratio of the last two updates
  int iterations = 0;
  bool converged = false;
};

struct ScatteringSolution {
  ComplexField scattered;
  ConvergenceReport report;
};

/// Born/Neumann iteration for (I - R_k M_q) u^sc = R_k f + α R_k M_q u^in.
ScatteringSolution lippmann_schwinger_solve(const ScatteringConfig& cfg);
ScatteringSolution lippmann_schwinger_solve(const ScatteringConfig& cfg, const Resolvent& resolvent);

/// ‖u - RHS - R_k M_q u‖₂ / ‖u‖₂ for a candidate solution u.
double fixed_point_residual(const ScatteringConfig& cfg, const Resolvent& resolvent,
                            const ComplexField& u_sc);

/// Volume density f + q(α u^in + u^sc) radiating the scattered field.
ComplexField radiating_density(const ScatteringConfig& cfg, const ComplexField& u_sc);

/// u∞(x̂,k) = (1/4π) Σ e^{-ik x̂·y} [f + q(α u^in + u^sc)](y) h³.
std::vector<Complex> far_field(const ScatteringConfig& cfg, const ComplexField& u_sc,
                               std::span<const Vec3> dirs);

/// u^sc evaluated at an arbitrary point x away from the radiating density.
Complex near_field_point(const ScatteringConfig& cfg, const ComplexField& u_sc, const Vec3& x);

/// First Born far field of q for incidence d: (1/4π) Σ e^{-ik(x̂-d)·y} q(y) h³.
Complex born_far_field(const ScalarField& q, double k, const Vec3& xhat, const Vec3& d);

/// Deterministic field or a migr law realized once per sweep.
using Ingredient = std::variant<ScalarField, MigrSpec>;

struct SweepTemplate {
  GridSpec grid;
  std::optional<Ingredient> source;
  std::optional<Ingredient> potential;
  int max_born_order = 20;
  double tol = 1e-10;
  std::size_t collar_cells = 4;
};

struct RealizedIngredients {
  std::optional<ScalarField> source;
  std::optional<ScalarField> potential;
};

/// Seed used for the potential's realization; the source uses the sweep seed.
constexpr std::uint64_t potential_seed(std::uint64_t seed) noexcept {
  return seed ^ 0x7A3D5C1B9E2F4860ULL;
}

RealizedIngredients realize(const SweepTemplate& tmpl, std::uint64_t seed);

/// Configuration of one solve at frequency k; d is used only when alpha = 1.
ScatteringConfig make_config(const SweepTemplate& tmpl, const RealizedIngredients& fields, double k,
                             int alpha, const Vec3& d);

/// Unit normal of a plane separating the support boxes of f and q, pointing
/// from f towards q; nullopt when the boxes are not at positive distance.
std::optional<Vec3> separating_normal(const ScalarField& f, const ScalarField& q);

/// Far fields over a frequency band under one realization (seed) of every
/// random ingredient. Active-backscatter pairs each x̂ with incidence -x̂.
FarFieldSet band_sweep(const SweepTemplate& tmpl, std::span<const double> frequencies,
                       std::span<const Vec3> dirs, Acquisition mode, std::uint64_t seed);

/// Fibonacci-lattice directions on the unit sphere.
std::vector<Vec3> fibonacci_sphere(std::size_t count);

}  // namespace rscat
