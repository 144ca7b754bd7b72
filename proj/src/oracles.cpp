#include "rscat/oracles.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rscat/rng.hpp"

namespace rscat::oracles {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kGaussPoints = 20;
using Gauss = boost::math::quadrature::gauss<double, kGaussPoints>;

// ∫₀^∞ sin(rρ) ρ^{1-m} e^{-ερ²} dρ, panel by panel over half-periods of sin(rρ).
double damped_integral(double m, double r, double eps, std::size_t& evals, std::size_t max_evals) {
  const double period = kPi / r;
  const double rho_max = std::sqrt(42.0 / eps);
  auto integrand = [&](double rho) { return std::sin(r * rho) * std::pow(rho, 1.0 - m) * std::exp(-eps * rho * rho); };

  // First panel: ρ = t^β removes the ρ^{2-m} endpoint singularity.
  const double beta = 1.0 / (3.0 - m);
  const double t_end = std::pow(period, 1.0 / beta);
  double total = Gauss::integrate(
      [&](double t) {
        if (t <= 0.0) return 0.0;
        const double rho = std::pow(t, beta);
        return integrand(rho) * beta * std::pow(t, beta - 1.0);
      },
      0.0, t_end);
  evals += kGaussPoints;

  for (double a = period; a < rho_max; a += period) {
    total += Gauss::integrate(integrand, a, a + period);
    evals += kGaussPoints;
    if (evals > max_evals) throw OracleError("riesz_kernel: evaluation budget exhausted");
  }
  return total;
}

}  // namespace

QuadratureSpec::QuadratureSpec() {
  for (double eps = 1e-3; eps > 5e-7; eps /= 2.0) damping.push_back(eps);
}

void QuadratureSpec::validate() const {
  if (!(rel_tol >= 1e-12)) throw ConfigError("quadrature: rel_tol must be at least 1e-12");
  if (max_evals == 0) throw ConfigError("quadrature: max_evals must be positive");
  if (damping.size() < 2) throw ConfigError("quadrature: damping schedule needs at least two values");
  for (std::size_t i = 0; i < damping.size(); ++i) {
    if (!(damping[i] > 0.0)) throw ConfigError("quadrature: damping values must be positive");
    if (i > 0 && !(damping[i] < damping[i - 1])) {
      throw ConfigError("quadrature: damping schedule must be strictly decreasing");
    }
  }
  if (damping.back() > 1e-6) throw ConfigError("quadrature: damping schedule must reach 1e-6");
}

double riesz_kernel(double m, double r, const QuadratureSpec& spec) {
  spec.validate();
  if (!(m >= 2.0 && m < 3.0)) {
    throw DomainError("riesz_kernel: m must lie in [2, 3); the radial integral diverges at m = 3");
  }
  if (!(r > 0.0)) throw DomainError("riesz_kernel: r must be positive");

  std::size_t evals = 0;
  const std::size_t n = spec.damping.size();
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = damped_integral(m, r, spec.damping[i], evals, spec.max_evals);

  // Neville's scheme in ε, evaluated at ε = 0.
  std::vector<double> p = values;
  double best = p[n - 1];
  double err = std::abs(values[n - 1] - values[n - 2]);
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = n - 1; i >= level; --i) {
      const double x_lo = spec.damping[i - level];
      const double x_hi = spec.damping[i];
      p[i] = (x_lo * p[i] - x_hi * p[i - 1]) / (x_lo - x_hi);
    }
    const double change = std::abs(p[n - 1] - best);
    best = p[n - 1];
    if (level >= 2 && change < err) err = change;
    if (level >= 3 && change > 10.0 * err) break;  // higher orders only amplify rounding
  }
  const double value = best / (2.0 * kPi * kPi * r);
  if (!std::isfinite(value) || err > spec.rel_tol * std::abs(best)) {
    std::ostringstream msg;
    msg << "riesz_kernel: extrapolation error " << err / std::abs(best) << " exceeds rel_tol "
        << spec.rel_tol << " at m=" << m << ", r=" << r;
    throw OracleError(msg.str());
  }
  return value;
}

double riesz_kernel_closed_form(double m, double r) {
  return boost::math::tgamma((3.0 - m) / 2.0) /
         (std::pow(2.0, m) * std::pow(kPi, 1.5) * boost::math::tgamma(m / 2.0)) * std::pow(r, m - 3.0);
}

Complex direct_farfield(const ScalarField& g, double k, const Vec3& dir) {
  const GridSpec& grid = g.grid();
  Complex sum{};
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (g[idx] == 0.0) continue;
    sum += g[idx] * std::exp(Complex(0.0, -k * dot(dir, grid.position(idx))));
  }
  return sum * grid.cell_volume() / (4.0 * kPi);
}

double potential_kernel_integral(const ScalarField& mu, const Vec3& x) {
  const GridSpec& grid = mu.grid();
  const double min_dist = 2.0 * grid.spacing();
  double sum = 0.0;
  for (std::size_t idx = 0; idx < mu.size(); ++idx) {
    if (mu[idx] == 0.0) continue;
    const double r = norm(x - grid.position(idx));
    if (r < min_dist) throw DomainError("potential_kernel_integral: x lies within 2h of supp mu");
    sum += mu[idx] / r;
  }
  return sum * grid.cell_volume();
}

CovarianceEstimate brute_covariance(const MigrSpec& spec, const Vec3& x, const Vec3& y, std::size_t n,
                                    std::uint64_t seed0) {
  spec.validate();
  if (n < 100) throw ConfigError("brute_covariance: n must be at least 100");
  const GridSpec& grid = spec.grid();
  if (grid.size() > 16 * 16 * 16) throw ConfigError("brute_covariance: grid larger than 16^3");
  const auto& d = grid.dims();
  const auto nx = grid.nearest_node(x);
  const auto ny = grid.nearest_node(y);
  if (!nx || !ny) throw ConfigError("brute_covariance: points must lie strictly inside the box");

  // Real-space kernel of |D|^{-m/2} on the periodic lattice, tabulated per wrapped offset.
  const double h = grid.spacing();
  auto freq = [&](std::size_t b, std::size_t len) {
    const long s = b < len / 2 ? static_cast<long>(b) : static_cast<long>(b) - static_cast<long>(len);
    return 2.0 * kPi * static_cast<double>(s) / (static_cast<double>(len) * h);
  };
  std::vector<double> kernel(grid.size(), 0.0);
  for (std::size_t a = 0; a < d[0]; ++a)
    for (std::size_t b = 0; b < d[1]; ++b)
      for (std::size_t c = 0; c < d[2]; ++c) {
        double acc = 0.0;
        for (std::size_t i = 0; i < d[0]; ++i)
          for (std::size_t j = 0; j < d[1]; ++j)
            for (std::size_t l = 0; l < d[2]; ++l) {
              const double xi0 = freq(i, d[0]), xi1 = freq(j, d[1]), xi2 = freq(l, d[2]);
              const double rho = std::sqrt(xi0 * xi0 + xi1 * xi1 + xi2 * xi2);
              double symbol = 1.0;
              if (spec.order > 0.0) symbol = rho > 0.0 ? std::pow(rho, -spec.order / 2.0) : 0.0;
              const double phase = 2.0 * kPi *
                                   (static_cast<double>(i * a) / static_cast<double>(d[0]) +
                                    static_cast<double>(j * b) / static_cast<double>(d[1]) +
                                    static_cast<double>(l * c) / static_cast<double>(d[2]));
              acc += symbol * std::cos(phase);
            }
        kernel[grid.flat(a, b, c)] = acc / static_cast<double>(grid.size());
      }

  auto value_at = [&](const Index3& p, const std::vector<double>& noise) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d[0]; ++i)
      for (std::size_t j = 0; j < d[1]; ++j)
        for (std::size_t l = 0; l < d[2]; ++l) {
          const std::size_t off = grid.flat((p[0] + d[0] - i) % d[0], (p[1] + d[1] - j) % d[1], (p[2] + d[2] - l) % d[2]);
          acc += kernel[off] * noise[grid.flat(i, j, l)];
        }
    const double mu = spec.strength[grid.flat(p[0], p[1], p[2])];
    return mu > 0.0 ? std::sqrt(mu) * acc : 0.0;
  };

  const double scale = std::pow(h, -1.5);
  double sum = 0.0, sum_sq = 0.0;
  std::vector<double> noise(grid.size());
  for (std::size_t s = 0; s < n; ++s) {
    auto gen = make_stream(seed0 + s, 0x6F72616331ULL);
    std::normal_distribution<double> normal;
    for (double& w : noise) w = normal(gen) * scale;
    const double prod = value_at(*nx, noise) * value_at(*ny, noise);
    sum += prod;
    sum_sq += prod * prod;
  }
  const auto nn = static_cast<double>(n);
  const double mean = sum / nn;
  const double var = std::max(0.0, (sum_sq - nn * mean * mean) / (nn - 1.0));
  return {mean, std::sqrt(var / nn)};
}

}  // namespace rscat::oracles
