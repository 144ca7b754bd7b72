#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rscat/oracles.hpp"
#include "rscat/rng.hpp"
#include "rscat/scatter.hpp"
#include "rscat/shapes.hpp"

using namespace rscat;

namespace {

constexpr double kPi = std::numbers::pi;

GridSpec cube(std::size_t n, double h) {
  const double half = 0.5 * static_cast<double>(n) * h;
  return GridSpec({n, n, n}, {-half, -half, -half}, h);
}

double rel(std::span<const Complex> a, std::span<const Complex> b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST(FundamentalSolution, Values) {
  EXPECT_NEAR(fundamental_solution(0.0, 1.0).real(), 1.0 / (4 * kPi), 1e-15);
  const Complex a = fundamental_solution(kPi, 1.0);
  EXPECT_NEAR(a.real(), -1.0 / (4 * kPi), 1e-15);
  EXPECT_NEAR(a.imag(), 0.0, 1e-15);
  const Complex b = fundamental_solution(1.0, 2.0);
  EXPECT_NEAR(b.real(), std::cos(2.0) / (8 * kPi), 1e-15);
  EXPECT_NEAR(b.imag(), std::sin(2.0) / (8 * kPi), 1e-15);
  EXPECT_THROW(fundamental_solution(1.0, 0.0), DomainError);
}

TEST(BallIntegral, SmallKLimitAndQuadrature) {
  EXPECT_DOUBLE_EQ(ball_integral(0.0, 0.3).real(), 0.045);
  EXPECT_LT(std::abs(ball_integral(1e-4, 0.3) - Complex(0.045 - 1e-8 * 0.0081 / 8, 1e-4 * 0.009)), 1e-15);
  // ∫_0^ρ e^{ikr} r dr by the midpoint rule.
  const double k = 3.0, rho = 0.4;
  Complex acc{};
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) * rho / n;
    acc += std::polar(r, k * r) * (rho / n);
  }
  EXPECT_LT(std::abs(ball_integral(k, rho) - acc), 1e-9);
  EXPECT_NEAR(equal_volume_radius(1.0), std::cbrt(3.0 / (4 * kPi)), 1e-15);
}

TEST(Resolvent, Linear) {
  const GridSpec g = cube(16, 0.1);
  auto gen = make_stream(1);
  std::normal_distribution<double> n;
  ComplexField a(g), b(g), mix(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.in_collar(i, 4)) continue;
    a[i] = {n(gen), n(gen)};
    b[i] = {n(gen), n(gen)};
    mix[i] = 2.0 * a[i] - Complex(0, 3) * b[i];
  }
  const Resolvent R(g, 4.0);
  const ComplexField ra = R.apply(a), rb = R.apply(b), rm = R.apply(mix);
  ComplexField expect(g);
  for (std::size_t i = 0; i < g.size(); ++i) expect[i] = 2.0 * ra[i] - Complex(0, 3) * rb[i];
  EXPECT_LT(rel(rm.values(), expect.values()), 1e-12);
}

TEST(Resolvent, DeltaReproducesFundamentalSolution) {
  const GridSpec g = cube(32, 0.05);
  const double k = 7.0;
  const ComplexField u = resolvent_apply(k, to_complex(discrete_delta(g, {0, 0, 0})));
  const Vec3 c{0, 0, 0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = norm(g.position(i) - c);
    if (r < 3 * g.spacing() - 1e-12) continue;
    ASSERT_LT(std::abs(u[i] - fundamental_solution(k, r)), 1e-12 * std::abs(fundamental_solution(k, r)));
  }
}

TEST(Resolvent, CollarViolationIsConfigError) {
  const GridSpec g = cube(16, 0.1);
  ComplexField f(g);
  f.at(1, 8, 8) = 1.0;
  EXPECT_THROW(resolvent_apply(1.0, f), ConfigError);
}

TEST(Resolvent, OutgoingPhaseAlongRays) {
  const GridSpec g = cube(32, 0.1);
  const double k = 5.0;
  const ComplexField u = resolvent_apply(k, to_complex(discrete_delta(g, {0, 0, 0})));
  for (std::size_t s = 3; s <= 14; ++s) {
    const double r = std::sqrt(3.0) * s * 0.1;
    if (16 + s >= 32) break;
    const Complex v = u.at(16 + s, 16 + s, 16 + s) * (4 * kPi * r);
    EXPECT_NEAR(std::arg(v * std::polar(1.0, -k * r)), 0.0, 1e-10);
  }
}

TEST(Resolvent, DiscreteHelmholtzResidual) {
  const GridSpec g = cube(64, 0.05);
  const double k = 2.0;  // wavelength π, h = 0.05 < π/10
  const ScalarField phi = gaussian_bump(g, {0, 0, 0}, 1.0, 0.2, 5.0);
  const ComplexField u = resolvent_apply(k, to_complex(phi));
  const double h2 = g.spacing() * g.spacing();
  double num = 0, den = 0;
  for (std::size_t i = 1; i + 1 < 64; ++i)
    for (std::size_t j = 1; j + 1 < 64; ++j)
      for (std::size_t l = 1; l + 1 < 64; ++l) {
        const Complex lap = (u.at(i + 1, j, l) + u.at(i - 1, j, l) + u.at(i, j + 1, l) + u.at(i, j - 1, l) +
                             u.at(i, j, l + 1) + u.at(i, j, l - 1) - 6.0 * u.at(i, j, l)) / h2;
        const Complex r = -lap - k * k * u.at(i, j, l) - phi.at(i, j, l);
        num += std::norm(r);
        den += phi.at(i, j, l) * phi.at(i, j, l);
      }
  EXPECT_LE(std::sqrt(num / den), 0.02);
}

TEST(PlaneWave, Values) {
  const GridSpec g({8, 8, 8}, {0, 0, 0}, 1.0);
  const ComplexField u = incident_plane_wave(kPi, {1, 0, 0}, g);
  EXPECT_NEAR(std::abs(u.at(0, 0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u.at(1, 0, 0) + 1.0), 0.0, 1e-15);
  const ComplexField w = incident_plane_wave(2.3, normalized(Vec3{1, 2, 3}), g);
  for (const auto& v : w.values())
    EXPECT_NEAR(std::abs(v), 1.0, 1e-14);
  EXPECT_THROW(incident_plane_wave(1.0, {1, 1, 0}, g), ConfigError);
}

TEST(LippmannSchwinger, ZeroPotentialTruncatesAfterOneApplication) {
  const GridSpec g = cube(16, 0.1);
  ScatteringConfig cfg(g);
  cfg.k = 3.0;
  cfg.source = gaussian_bump(g, {0, 0, 0}, 1.0, 0.1, 3.0);
  cfg.potential = ScalarField(g);
  const ScatteringSolution s = lippmann_schwinger_solve(cfg);
  EXPECT_EQ(s.scattered.vector(), resolvent_apply(3.0, to_complex(*cfg.source)).vector());
  EXPECT_LE(s.report.updates.back(), 1e-14);
  EXPECT_TRUE(s.report.converged);
}

TEST(LippmannSchwinger, ZeroRightHandSide) {
  const GridSpec g = cube(16, 0.1);
  ScatteringConfig cfg(g);
  cfg.potential = gaussian_bump(g, {0, 0, 0}, 1.0, 0.1, 3.0);
  const ScatteringSolution s = lippmann_schwinger_solve(cfg);
  for (const auto& v : s.scattered.values()) EXPECT_EQ(v, Complex{});
}

TEST(LippmannSchwinger, SmallPotentialResidual) {
  const GridSpec g = cube(32, 0.05);
  ScatteringConfig cfg(g);
  cfg.k = 4.0;
  cfg.alpha = 1;
  cfg.direction = normalized(Vec3{0.3, -0.2, 1.0});
  cfg.potential = gaussian_bump(g, {0, 0, 0}, 20.0, 0.15, 3.0);
  const Resolvent R(g, cfg.k);
  const ScatteringSolution s = lippmann_schwinger_solve(cfg, R);
  EXPECT_GT(s.report.contraction, 0.05);
  EXPECT_LT(s.report.contraction, 0.6);
  EXPECT_LE(fixed_point_residual(cfg, R, s.scattered), 1e-8);
}

TEST(LippmannSchwinger, StrongPotentialDiverges) {
  const GridSpec g = cube(32, 0.05);
  ScatteringConfig cfg(g);
  cfg.k = 4.0;
  cfg.alpha = 1;
  cfg.potential = gaussian_bump(g, {0, 0, 0}, 400.0, 0.15, 3.0);
  try {
    lippmann_schwinger_solve(cfg);
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_GE(e.contraction(), 1.0);
  }
}

TEST(LippmannSchwinger, BudgetExhaustion) {
  const GridSpec g = cube(32, 0.05);
  ScatteringConfig cfg(g);
  cfg.k = 4.0;
  cfg.alpha = 1;
  cfg.potential = gaussian_bump(g, {0, 0, 0}, 20.0, 0.15, 3.0);
  cfg.max_born_order = 2;
  try {
    lippmann_schwinger_solve(cfg);
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.last_update(), cfg.tol);
  }
}

TEST(LippmannSchwinger, ConfigValidation) {
  const GridSpec g = cube(16, 0.1);
  ScatteringConfig cfg(g);
  cfg.k = -1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.k = 1.0;
  cfg.alpha = 1;
  cfg.direction = {1, 0, 1e-5};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.direction = {1, 0, 0};
  cfg.tol = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.tol = 1e-10;
  cfg.source = ball_indicator(g, {0, 0, 0}, 0.6, 1.0);
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(FarField, DeltaAtOrigin) {
  const GridSpec g = cube(16, 0.1);
  ScatteringConfig cfg(g);
  cfg.source = discrete_delta(g, {0, 0, 0});
  const auto dirs = fibonacci_sphere(7);
  for (double k : {0.5, 3.0, 11.0}) {
    cfg.k = k;
    for (const Complex& v : far_field(cfg, ComplexField(g), dirs)) EXPECT_NEAR(std::abs(v - 1.0 / (4 * kPi)), 0.0, 1e-15);
  }
}

TEST(FarField, TranslationPhase) {
  const GridSpec g = cube(32, 0.1);
  ScatteringConfig a(g), b(g);
  a.k = b.k = 3.7;
  a.source = gaussian_bump(g, {0, 0, 0}, 1.0, 0.2, 2.93);
  b.source = gaussian_bump(g, {0.3, -0.2, 0.5}, 1.0, 0.2, 2.93);
  const Vec3 shift{0.3, -0.2, 0.5};
  const auto dirs = fibonacci_sphere(5);
  const auto ua = far_field(a, ComplexField(g), dirs), ub = far_field(b, ComplexField(g), dirs);
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    EXPECT_LT(std::abs(ub[i] - ua[i] * std::polar(1.0, -3.7 * dot(dirs[i], shift))), 1e-12 * std::abs(ua[i]));
  }
}

TEST(FarField, GaussianMatchesAnalyticTransform) {
  const GridSpec g = cube(64, 1.0 / 32.0);
  const double s = 0.15;
  ScatteringConfig cfg(g);
  cfg.source = gaussian_bump(g, {0, 0, 0}, 1.0, s, 6.0);
  const auto dirs = fibonacci_sphere(6);
  for (double k : {2.0, 10.0, 20.0}) {
    cfg.k = k;
    const auto u = far_field(cfg, ComplexField(g), dirs);
    // (2π)^{3/2}/(4π) · F f(kx̂) with F f(ξ) = s³ e^{-s²|ξ|²/2}
    const double expect = std::pow(2 * kPi, 1.5) / (4 * kPi) * s * s * s * std::exp(-s * s * k * k / 2);
    for (const Complex& v : u) EXPECT_LT(std::abs(v - expect), 0.01 * expect) << "k=" << k;
  }
}

TEST(FarField, AgreesWithDirectOracle) {
  const GridSpec g = cube(32, 0.1);
  ScatteringConfig cfg(g);
  cfg.k = 6.0;
  cfg.source = ball_indicator(g, {0.1, 0.2, 0}, 0.5, 1.3);
  const auto dirs = fibonacci_sphere(9);
  const auto u = far_field(cfg, ComplexField(g), dirs);
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const Complex o = oracles::direct_farfield(*cfg.source, 6.0, dirs[i]);
    EXPECT_LT(std::abs(u[i] - o), 1e-12 * std::abs(o));
  }
}

TEST(FarField, MatchesPointEvaluationFarAway) {
  const GridSpec g = cube(32, 0.05);
  ScatteringConfig cfg(g);
  cfg.k = 5.0;
  cfg.source = gaussian_bump(g, {0, 0, 0}, 1.0, 0.1, 3.0);
  const double diam = 0.6;
  const Vec3 xhat = normalized(Vec3{1, 0.5, -0.3});
  const double R = 50 * diam;
  const Complex near = near_field_point(cfg, ComplexField(g), xhat * R) * R * std::polar(1.0, -cfg.k * R);
  const Complex far = far_field(cfg, ComplexField(g), std::span(&xhat, 1))[0];
  EXPECT_LE(std::abs(near - far), 0.02 * std::abs(far));
}

TEST(FarField, BornReciprocity) {
  const GridSpec g = cube(16, 0.1);
  const ScalarField q = ball_indicator(g, {0.05, 0.1, -0.1}, 0.3, 0.7);
  auto gen = make_stream(3);
  std::normal_distribution<double> n;
  for (int t = 0; t < 10; ++t) {
    const Vec3 x = normalized(Vec3{n(gen), n(gen), n(gen)}), d = normalized(Vec3{n(gen), n(gen), n(gen)});
    EXPECT_LT(std::abs(born_far_field(q, 2.5, x, d) - born_far_field(q, 2.5, -d, -x)), 1e-12);
  }
}

TEST(FarField, DoublingSourceDoublesExactly) {
  const GridSpec g = cube(16, 0.1);
  ScatteringConfig cfg(g);
  cfg.k = 2.0;
  cfg.source = gaussian_bump(g, {0, 0, 0}, 1.0, 0.1, 3.0);
  cfg.potential = gaussian_bump(g, {0, 0, 0.05}, 3.0, 0.1, 3.0);
  const Vec3 d{0, 0, 1};
  const Complex a = far_field(cfg, lippmann_schwinger_solve(cfg).scattered, std::span(&d, 1))[0];
  for (double& v : cfg.source->values()) v *= 2.0;
  const Complex b = far_field(cfg, lippmann_schwinger_solve(cfg).scattered, std::span(&d, 1))[0];
  EXPECT_LT(std::abs(b - 2.0 * a), 1e-13 * std::abs(a));
}

TEST(Sweep, ZeroIngredientsGiveZeroData) {
  const GridSpec g = cube(16, 0.1);
  SweepTemplate t{g, ScalarField(g), ScalarField(g)};
  const std::vector<double> k = {1.0, 1.5, 2.0};
  const auto dirs = fibonacci_sphere(4);
  const FarFieldSet set = band_sweep(t, k, dirs, Acquisition::passive, 0);
  for (const auto& e : set.entries()) EXPECT_EQ(e.value, Complex{});
}

TEST(Sweep, DeterministicForSameSeed) {
  const GridSpec g = cube(32, 0.1);
  SweepTemplate t{g, MigrSpec(2.5, gaussian_bump(g, {0, 0, 0}, 1.0, 0.2, 3.0))};
  const std::vector<double> k = {5.0, 5.25, 5.5, 5.75};
  const auto dirs = fibonacci_sphere(8);
  const FarFieldSet a = band_sweep(t, k, dirs, Acquisition::passive, 9);
  const FarFieldSet b = band_sweep(t, k, dirs, Acquisition::passive, 9);
  const FarFieldSet c = band_sweep(t, k, dirs, Acquisition::passive, 10);
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    EXPECT_EQ(a.entries()[i].value, b.entries()[i].value);
    EXPECT_NE(a.entries()[i].value, c.entries()[i].value);
  }
  EXPECT_EQ(a.meta().m, 2.5);
  EXPECT_EQ(a.meta().seed, 9u);
}

TEST(Sweep, PassiveEntriesMatchSingleSolvesBitForBit) {
  const GridSpec g = cube(64, 1.0 / 32.0);
  SweepTemplate t{g, MigrSpec(2.5, gaussian_bump(g, {0, 0, 0}, 1.0, 0.15, 4.0))};
  std::vector<double> k(256);
  for (std::size_t j = 0; j < k.size(); ++j) k[j] = 20.0 + j * (20.0 / 256.0);
  const auto dirs = fibonacci_sphere(4);
  const FarFieldSet set = band_sweep(t, k, dirs, Acquisition::passive, 123);
  const RealizedIngredients fields = realize(t, 123);
  auto gen = make_stream(4);
  for (int pick = 0; pick < 8; ++pick) {
    const std::size_t ik = gen() % k.size(), id = gen() % dirs.size();
    const ScatteringConfig cfg = make_config(t, fields, k[ik], 0, {0, 0, 1});
    const Complex single = far_field(cfg, lippmann_schwinger_solve(cfg).scattered, std::span(&dirs[id], 1))[0];
    EXPECT_EQ(set.value(id, static_cast<long>(ik)).value(), single);
  }
}

TEST(Sweep, ActiveBackscatterMatchesSingleSolves) {
  const GridSpec g = cube(16, 0.1);
  SweepTemplate t{g, std::nullopt, ScalarField(gaussian_bump(g, {0, 0, 0}, 2.0, 0.1, 3.0))};
  const std::vector<double> k = {2.0, 2.5, 3.0};
  const auto dirs = fibonacci_sphere(3);
  const FarFieldSet set = band_sweep(t, k, dirs, Acquisition::active_backscatter, 0);
  const RealizedIngredients fields = realize(t, 0);
  const ScatteringConfig cfg = make_config(t, fields, 2.5, 1, -dirs[1]);
  const Complex single = far_field(cfg, lippmann_schwinger_solve(cfg).scattered, std::span(&dirs[1], 1))[0];
  EXPECT_EQ(set.value(1, 1).value(), single);
}

TEST(Sweep, RejectsNonUniformFrequencies) {
  const GridSpec g = cube(16, 0.1);
  SweepTemplate t{g, ScalarField(g)};
  const std::vector<double> k = {1.0, 1.5, 2.1};
  const auto dirs = fibonacci_sphere(2);
  EXPECT_THROW(band_sweep(t, k, dirs, Acquisition::passive, 0), ConfigError);
}

TEST(Sweep, DivergenceAnnotatedWithFrequency) {
  const GridSpec g = cube(32, 0.05);
  SweepTemplate t{g, std::nullopt, ScalarField(gaussian_bump(g, {0, 0, 0}, 400.0, 0.15, 3.0))};
  const std::vector<double> k = {4.0, 4.5};
  const auto dirs = fibonacci_sphere(1);
  try {
    band_sweep(t, k, dirs, Acquisition::active_backscatter, 0);
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_NE(std::string(e.what()).find("k=4"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("dir="), std::string::npos);
  }
}

TEST(Sweep, BothRandomNeedSeparatedSupports) {
  const GridSpec g = cube(32, 0.05);
  SweepTemplate t{g, MigrSpec(2.5, gaussian_bump(g, {-0.3, 0, 0}, 1.0, 0.05, 3.0)),
                  MigrSpec(3.5, gaussian_bump(g, {0.3, 0, 0}, 1.0, 0.05, 3.0))};
  const std::vector<double> k = {1.0, 1.5};
  const auto dirs = fibonacci_sphere(2);
  const FarFieldSet set = band_sweep(t, k, dirs, Acquisition::passive, 0);
  ASSERT_TRUE(set.meta().normal.has_value());
  EXPECT_NEAR(set.meta().normal->x, 1.0, 1e-15);

  SweepTemplate overlap{g, MigrSpec(2.5, gaussian_bump(g, {0, 0, 0}, 1.0, 0.05, 3.0)),
                        MigrSpec(3.5, gaussian_bump(g, {0.1, 0, 0}, 1.0, 0.05, 3.0))};
  EXPECT_THROW(band_sweep(overlap, k, dirs, Acquisition::passive, 0), ConfigError);
}

TEST(SeparatingNormal, PointsFromSourceToPotential) {
  const GridSpec g = cube(32, 0.05);
  const auto n = separating_normal(ball_indicator(g, {0, -0.4, 0}, 0.1, 1.0), ball_indicator(g, {0, 0.4, 0.0}, 0.1, 1.0));
  ASSERT_TRUE(n);
  EXPECT_NEAR(n->y, 1.0, 1e-15);
  EXPECT_FALSE(separating_normal(ball_indicator(g, {0, 0, 0}, 0.2, 1.0), ball_indicator(g, {0.1, 0, 0}, 0.2, 1.0)));
}

TEST(Fibonacci, UnitAndSpread) {
  const auto d = fibonacci_sphere(64);
  ASSERT_EQ(d.size(), 64u);
  Vec3 sum{};
  for (const auto& v : d) {
    EXPECT_TRUE(is_unit(v));
    sum = sum + v;
  }
  EXPECT_LT(norm(sum), 0.2);
}
