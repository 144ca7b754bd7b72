#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rscat/migr.hpp"
#include "rscat/oracles.hpp"
#include "rscat/rng.hpp"
#include "rscat/shapes.hpp"

using namespace rscat;
using namespace rscat::oracles;

namespace {

constexpr double kPi = std::numbers::pi;

GridSpec cube(std::size_t n, double h) {
  const double half = 0.5 * static_cast<double>(n) * h;
  return GridSpec({n, n, n}, {-half, -half, -half}, h);
}

}  // namespace

TEST(Riesz, DirichletAnchor) {
  const double v = riesz_kernel(2.0, 0.5);
  EXPECT_NEAR(v, 1.0 / (2 * kPi), 1e-8 / (2 * kPi));
}

TEST(Riesz, Homogeneity) {
  for (double m : {2.0, 2.3, 2.5, 2.8}) {
    const double a = riesz_kernel(m, 0.4), b = riesz_kernel(m, 0.8);
    EXPECT_NEAR(b, std::pow(2.0, m - 3) * a, 2e-8 * std::abs(b)) << m;
  }
}

TEST(Riesz, AgreesWithGammaClosedForm) {
  for (double m : {2.0, 2.5, 2.9}) {
    for (double r : {0.1, 1.0, 3.0}) {
      const double q = riesz_kernel(m, r), c = riesz_kernel_closed_form(m, r);
      EXPECT_NEAR(q, c, 1e-7 * c) << "m=" << m << " r=" << r;
    }
  }
  EXPECT_GT(riesz_kernel(2.5, 1.0), 0.0);
}

TEST(Riesz, MonotoneInDistance) {
  double prev = INFINITY;
  for (int i = 1; i <= 20; ++i) {
    const double v = riesz_kernel(2.5, 0.1 * i);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Riesz, DomainAndSpecErrors) {
  EXPECT_THROW(riesz_kernel(3.0, 1.0), DomainError);
  EXPECT_THROW(riesz_kernel(1.5, 1.0), DomainError);
  EXPECT_THROW(riesz_kernel(2.5, 0.0), DomainError);
  QuadratureSpec bad;
  bad.rel_tol = 1e-14;
  EXPECT_THROW(bad.validate(), ConfigError);
  QuadratureSpec coarse;
  coarse.damping = {1e-2, 1e-3};
  EXPECT_THROW(coarse.validate(), ConfigError);
  QuadratureSpec unordered;
  unordered.damping = {1e-3, 1e-2, 1e-7};
  EXPECT_THROW(unordered.validate(), ConfigError);
}

TEST(Riesz, FailsLoudlyWhenBudgetTooSmall) {
  QuadratureSpec tiny;
  tiny.max_evals = 1000;
  EXPECT_THROW(riesz_kernel(2.5, 1.0, tiny), OracleError);
}

TEST(DirectFarfield, DeltaShiftAndLinearity) {
  const GridSpec g = cube(16, 0.1);
  const ScalarField delta = discrete_delta(g, {0, 0, 0});
  const Vec3 dir = normalized(Vec3{1, -2, 0.5});
  for (double k : {0.3, 4.0, 17.5}) EXPECT_NEAR(std::abs(direct_farfield(delta, k, dir) - 1.0 / (4 * kPi)), 0.0, 1e-16);

  const Vec3 a{0.2, -0.1, 0.3};
  const ScalarField shifted = discrete_delta(g, a);
  const Complex expect = std::polar(1.0 / (4 * kPi), -4.0 * dot(dir, a));
  EXPECT_LT(std::abs(direct_farfield(shifted, 4.0, dir) - expect), 1e-15);

  const ScalarField f = gaussian_bump(g, {0, 0, 0}, 1.0, 0.1, 3.0);
  const ScalarField b = ball_indicator(g, {0.1, 0, 0}, 0.2, 2.0);
  ScalarField mix(g);
  for (std::size_t i = 0; i < g.size(); ++i) mix[i] = 3.0 * f[i] - 0.5 * b[i];
  const Complex lhs = direct_farfield(mix, 6.1, dir);
  const Complex rhs = 3.0 * direct_farfield(f, 6.1, dir) - 0.5 * direct_farfield(b, 6.1, dir);
  EXPECT_LT(std::abs(lhs - rhs), 1e-15 * std::abs(rhs) + 1e-17);
}

TEST(PotentialIntegral, Examples) {
  const GridSpec g = cube(32, 0.1);
  EXPECT_EQ(potential_kernel_integral(ScalarField(g), {0.5, 0.5, 0.5}), 0.0);
  EXPECT_NEAR(potential_kernel_integral(discrete_delta(g, {0, 0, 0}), {0, 0, 2.0}), 0.5, 1e-15);

  const double s = 0.1;
  const ScalarField mu = gaussian_bump(g, {0, 0, 0}, 1.0, s, 3.0);
  double mass = 0;
  for (double v : mu.values()) mass += v * g.cell_volume();
  const Vec3 x{1.0, 0.3, -0.2};
  const double v = potential_kernel_integral(mu, x);
  EXPECT_NEAR(v, mass / norm(x), 0.01 * mass / norm(x));
  EXPECT_THROW(potential_kernel_integral(mu, {0.0, 0.0, 0.35}), DomainError);
}

TEST(BruteCovariance, ZeroOutsideSupport) {
  const GridSpec g = cube(16, 0.1);
  const MigrSpec spec(2.5, gaussian_bump(g, {0, 0, 0}, 1.0, 0.1, 2.5));
  const CovarianceEstimate e = brute_covariance(spec, {0.6, 0.6, 0.6}, {0.6, 0.6, 0.6}, 100, 1);
  EXPECT_EQ(e.value, 0.0);
  EXPECT_EQ(e.std_error, 0.0);
  EXPECT_THROW(brute_covariance(spec, {0, 0, 0}, {0, 0, 0}, 50, 1), ConfigError);
}

TEST(BruteCovariance, AgreesWithSpectralSynthesis) {
  const GridSpec g = cube(16, 0.1);
  const MigrSpec spec(2.5, gaussian_bump(g, {0, 0, 0}, 1.0, 0.1, 2.5));
  auto gen = make_stream(42);
  std::uniform_real_distribution<double> u(-0.15, 0.15);
  std::vector<PointPair> pairs;
  for (int i = 0; i < 5; ++i) pairs.push_back({{u(gen), u(gen), u(gen)}, {u(gen), u(gen), u(gen)}});
  const auto fft = empirical_covariance(spec, pairs, 400, 1000);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const CovarianceEstimate b = brute_covariance(spec, pairs[i].x, pairs[i].y, 400, 5000);
    EXPECT_LT(std::abs(b.value - fft[i].value), 3 * std::hypot(b.std_error, fft[i].std_error)) << i;
  }
}

TEST(BruteCovariance, DoublingStrengthDoublesCovariance) {
  const GridSpec g = cube(16, 0.1);
  const ScalarField mu = gaussian_bump(g, {0, 0, 0}, 1.0, 0.1, 2.5);
  ScalarField mu2 = mu;
  for (double& v : mu2.values()) v *= 2.0;
  const Vec3 x{0.05, 0, 0}, y{-0.05, 0.1, 0};
  const CovarianceEstimate a = brute_covariance(MigrSpec(2.5, mu), x, y, 300, 7);
  const CovarianceEstimate b = brute_covariance(MigrSpec(2.5, mu2), x, y, 300, 7);
  EXPECT_LT(std::abs(b.value - 2 * a.value), 3 * std::hypot(b.std_error, 2 * a.std_error));
}
