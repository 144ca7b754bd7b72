#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "rscat/oracles.hpp"
#include "rscat/recovery.hpp"
#include "rscat/scatter.hpp"
#include "rscat/shapes.hpp"

using namespace rscat;

namespace {

const double kPrefactor = 4.0 * std::sqrt(2.0 * std::numbers::pi);

FarFieldSet make_set(const std::vector<Vec3>& dirs, double lo, double delta, std::size_t n,
                     const std::function<Complex(std::size_t, double)>& u,
                     Acquisition kind = Acquisition::passive) {
  FarFieldMeta meta;
  meta.kind = kind;
  meta.band_lo = lo;
  meta.delta = delta;
  meta.band_hi = lo + static_cast<double>(n - 1) * delta;
  std::vector<FarFieldEntry> entries;
  for (std::size_t d = 0; d < dirs.size(); ++d)
    for (std::size_t j = 0; j < n; ++j) {
      const double k = lo + static_cast<double>(j) * delta;
      entries.push_back({dirs[d], k, u(d, k)});
    }
  return FarFieldSet(meta, std::move(entries));
}

GridSpec cube(std::size_t n, double h) {
  const double half = 0.5 * static_cast<double>(n) * h;
  return GridSpec({n, n, n}, {-half, -half, -half}, h);
}

}  // namespace

TEST(BandCorrelation, ConstantDataGivesPrefactor) {
  const std::vector<Vec3> dirs = {{0, 0, 1}};
  const FarFieldSet ff = make_set(dirs, 10.0, 10.0 / 64, 160, [](std::size_t, double) { return Complex{1.0}; });
  for (double tau : {0.0, 10.0 / 64, 2.5, 5.0}) {
    const CorrelationEstimate e = band_correlation(ff, 0.0, tau, dirs[0], 10.0);
    EXPECT_NEAR(std::abs(e.value - kPrefactor), 0.0, 1e-10) << tau;
    EXPECT_EQ(e.n_terms, 64u);
  }
}

TEST(BandCorrelation, PowerLawDataAtZeroShift) {
  const std::vector<Vec3> dirs = {{1, 0, 0}};
  const double m = 2.5;
  const FarFieldSet ff =
      make_set(dirs, 20.0, 20.0 / 256, 257, [&](std::size_t, double k) { return Complex{std::pow(k, -m / 2)}; });
  EXPECT_NEAR(std::abs(band_correlation(ff, m, 0.0, dirs[0], 20.0).value - kPrefactor), 0.0, 1e-6);
}

TEST(BandCorrelation, MonteCarloMeanOfGaussianProcess) {
  const SyntheticProcess proc{0.7, 2.5, 77};
  const std::vector<Vec3> dirs = {{0, 1, 0}};
  const double K = 8.0, delta = K / 512;
  const int reps = 200;
  double sum = 0, sum2 = 0;
  for (int r = 0; r < reps; ++r) {
    const FarFieldSet ff = make_set(dirs, K, delta, 512, [&](std::size_t, double k) { return proc.sample(r, k); });
    const double v = band_correlation(ff, 2.5, 0.0, dirs[0], K).value.real();
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sum2 / reps - mean * mean) / (reps - 1));
  EXPECT_LT(std::abs(mean - kPrefactor * 0.7), 3 * se);
  EXPECT_GT(se, 0.0);
}

TEST(BandCorrelation, ZeroShiftIsRealAndNonNegative) {
  const SyntheticProcess proc{1.0, 3.0, 5};
  const auto dirs = fibonacci_sphere(3);
  const FarFieldSet ff = make_set(dirs, 4.0, 0.125, 64, [&](std::size_t d, double k) { return proc.sample(d, k); });
  for (const auto& d : dirs) {
    const Complex v = band_correlation(ff, 3.0, 0.0, d, 4.0).value;
    EXPECT_EQ(v.imag(), 0.0);
    EXPECT_GE(v.real(), 0.0);
  }
}

TEST(BandCorrelation, QuadraticInDataScale) {
  const SyntheticProcess proc{1.0, 2.0, 6};
  const std::vector<Vec3> dirs = {{0, 0, 1}};
  const FarFieldSet a = make_set(dirs, 4.0, 0.125, 64, [&](std::size_t, double k) { return proc.sample(0, k); });
  const FarFieldSet b = make_set(dirs, 4.0, 0.125, 64, [&](std::size_t, double k) { return -1.5 * proc.sample(0, k); });
  const Complex va = band_correlation(a, 2.0, 1.0, dirs[0], 4.0).value;
  const Complex vb = band_correlation(b, 2.0, 1.0, dirs[0], 4.0).value;
  EXPECT_LT(std::abs(vb - 2.25 * va), 1e-14 * std::abs(va));
}

TEST(BandCorrelation, CoverageAndMeshErrors) {
  const std::vector<Vec3> dirs = {{0, 0, 1}};
  const FarFieldSet ff = make_set(dirs, 4.0, 0.125, 40, [](std::size_t, double) { return Complex{1.0}; });
  try {
    band_correlation(ff, 0.0, 1.5, dirs[0], 4.0);  // needs up to 9.375
    FAIL();
  } catch (const CoverageError& e) {
    EXPECT_NE(std::string(e.what()).find("9.125"), std::string::npos) << e.what();
  }
  EXPECT_THROW(band_correlation(ff, 0.0, 0.1, dirs[0], 2.0), ConfigError);       // off-mesh τ
  EXPECT_THROW(band_correlation(ff, 0.0, 0.0, dirs[0], 1.0), ConfigError);       // < 16 terms
  EXPECT_THROW(band_correlation(ff, 0.0, 0.0, {1, 0, 0}, 2.0), CoverageError);  // direction absent
}

TEST(BandCorrelation, BackscatterUsesHalfShift) {
  const std::vector<Vec3> dirs = {{0, 0, 1}};
  const FarFieldSet ff = make_set(dirs, 4.0, 0.125, 80, [](std::size_t, double k) { return std::polar(1.0, 0.3 * k * k); },
                                  Acquisition::active_backscatter);
  const Complex a = backscatter_correlation(ff, 1.5, 1.0, dirs[0], 4.0).value;
  const Complex b = band_correlation(ff, 1.5, 0.5, dirs[0], 4.0).value;
  EXPECT_EQ(a, b);
}

TEST(HermitianComplete, MirrorsAreConjugates) {
  const Vec3 n{0, 0, 1};
  std::vector<CorrelationEstimate> s;
  s.push_back({2.0, normalized(Vec3{1, 1, 1}), 4, 8, {1.5, -0.5}, 32});
  s.push_back({2.0, {0, 0, 1}, 4, 8, {3.0, 0.0}, 32});
  s.push_back({2.0, {1, 0, 0}, 4, 8, {1.0, 1.0}, 32});
  s.push_back({2.0, {-1, 0, 0}, 4, 8, {1.0, -3.0}, 32});
  const auto full = hermitian_complete(s, n);
  auto find = [&](const Vec3& d) {
    for (const auto& e : full)
      if (norm(e.dir - d) < 1e-12) return e.value;
    ADD_FAILURE() << "missing direction";
    return Complex{};
  };
  EXPECT_EQ(find(-normalized(Vec3{1, 1, 1})), Complex(1.5, 0.5));
  EXPECT_EQ(find({0, 0, -1}), Complex(3.0, 0.0));
  // equatorial pair: v(x) ← (v(x) + conj v(-x)) / 2
  EXPECT_EQ(find({1, 0, 0}), Complex(1.0, 2.0));
  EXPECT_EQ(find({-1, 0, 0}), Complex(1.0, -2.0));
}

TEST(HermitianComplete, Errors) {
  std::vector<CorrelationEstimate> s;
  s.push_back({1.0, {0, 0, -1}, 4, 8, {1.0, 0.0}, 32});
  EXPECT_THROW(hermitian_complete(s, {0, 0, 1}), ConfigError);
  s[0].dir = {1, 0, 0};
  EXPECT_THROW(hermitian_complete(s, {0, 0, 1}), CoverageError);
}

TEST(Reconstruction, HermitianSamplesGiveRealField) {
  const GridSpec g = cube(32, 1.0 / 16);
  const ScalarField mu = gaussian_bump(g, {0.1, 0, -0.05}, 1.0, 0.15, 3.0);
  const auto dirs = fibonacci_sphere(48);
  std::vector<CorrelationEstimate> s;
  for (int l = 0; l <= 20; ++l)
    for (const auto& d : dirs) {
      const double tau = 1.0 * l;
      s.push_back({tau, d, 0, 0, strength_transform(mu, d * tau), 16});
    }
  const Reconstruction rec = reconstruct_from_polar(conjugate_complete(s), g);
  EXPECT_LT(rec.imaginary_ratio, 1e-10);
  EXPECT_LT(relative_l2_on_support(rec.real_part, mu), 0.15);
}

TEST(Reconstruction, StrengthTransformOfGaussian) {
  const GridSpec g = cube(32, 1.0 / 16);
  const double s = 0.15;
  const ScalarField mu = gaussian_bump(g, {0, 0, 0}, 1.0, s, 6.0);
  for (double r : {0.0, 5.0, 12.0}) {
    const Vec3 xi = normalized(Vec3{1, 2, -1}) * r;
    const double expect = s * s * s * std::exp(-s * s * r * r / 2);
    EXPECT_LT(std::abs(strength_transform(mu, xi) - expect), 1e-6 * s * s * s);
  }
}

TEST(Recovery, ZeroDataGivesZeroStrength) {
  const GridSpec g = cube(16, 0.125);
  const auto dirs = fibonacci_sphere(8);
  const FarFieldSet ff = make_set(dirs, 4.0, 0.25, 40, [](std::size_t, double) { return Complex{}; });
  RecoveryRequest req{2.5, {0.0, 0.5, 1.0}, dirs, 4.0, std::nullopt, g, std::nullopt};
  const RecoveryReport rep = recover_source_strength(ff, req);
  for (double v : rep.mu_rec.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(rep.samples.size(), 24u);
}

TEST(Recovery, KindMismatch) {
  const GridSpec g = cube(16, 0.125);
  const auto dirs = fibonacci_sphere(4);
  const FarFieldSet passive = make_set(dirs, 4.0, 0.25, 40, [](std::size_t, double) { return Complex{}; });
  const FarFieldSet active =
      make_set(dirs, 4.0, 0.25, 40, [](std::size_t, double) { return Complex{}; }, Acquisition::active_backscatter);
  RecoveryRequest req{2.5, {0.0, 0.5}, dirs, 4.0, std::nullopt, g, std::nullopt};
  EXPECT_THROW(recover_potential_strength(passive, req), ConfigError);
  EXPECT_THROW(recover_source_strength(active, req), ConfigError);
}

TEST(Recovery, CompletingThenSamplingMirrorIsConjugate) {
  const SyntheticProcess proc{1.0, 2.5, 11};
  const auto dirs = fibonacci_sphere(6);
  const FarFieldSet ff = make_set(dirs, 4.0, 0.125, 80, [&](std::size_t d, double k) { return proc.sample(d, k); });
  std::vector<CorrelationEstimate> s;
  for (const auto& d : dirs) s.push_back(band_correlation(ff, 2.5, 1.0, d, 4.0));
  const auto full = conjugate_complete(s);
  for (const auto& e : s) {
    bool found = false;
    for (const auto& f : full)
      if (norm(f.dir + e.dir) < 1e-12 && f.tau == e.tau) {
        EXPECT_EQ(f.value, std::conj(e.value));
        found = true;
      }
    EXPECT_TRUE(found);
  }
}

TEST(Recovery, BackscatterCorrelationMatchesBornOracle) {
  const GridSpec g = cube(32, 1.0 / 16);
  const ScalarField q = gaussian_bump(g, {0.05, -0.05, 0}, 0.1, 0.2, 3.3);
  SweepTemplate t{g, std::nullopt, q};
  const double delta = 0.125;
  std::vector<double> k;
  for (int j = 0; j < 40; ++j) k.push_back(1.0 + j * delta);
  const std::vector<Vec3> dirs = {normalized(Vec3{1, 0.4, 0.2}), {0, 0, 1}};
  const FarFieldSet ff = band_sweep(t, k, dirs, Acquisition::active_backscatter, 0);
  const double tau = 1.0;  // shift τ/2 = 4δ
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    for (int j = 0; j + 4 < 40; j += 5) {
      const Complex pair = std::conj(*ff.value(d, j)) * *ff.value(d, j + 4);
      const Complex oracle = std::conj(oracles::direct_farfield(q, 2 * k[j], dirs[d])) *
                             oracles::direct_farfield(q, 2 * k[j] + tau, dirs[d]);
      EXPECT_LT(std::abs(pair - oracle), 0.01 * std::abs(oracle)) << "k=" << k[j];
    }
  }
}

TEST(Ergodic, ZeroProcessHasNoSpread) {
  const SyntheticProcess proc{0.0, 2.0, 1};
  const std::vector<BandMesh> bands = {{4, 16}, {4, 64}, {4, 256}};
  for (const auto& b : ergodic_diagnostic(proc, bands, 5)) EXPECT_EQ(b.rms_deviation, 0.0);
}

TEST(Ergodic, QuadruplingMeshHalvesDeviation) {
  const SyntheticProcess proc{0.7, 2.5, 2024};
  const std::vector<BandMesh> bands = {{8, 64}, {8, 256}, {8, 1024}};
  const auto r = ergodic_diagnostic(proc, bands, 50);
  ASSERT_EQ(r.size(), 3u);
  for (int i = 0; i < 2; ++i) {
    const double ratio = r[i].rms_deviation / r[i + 1].rms_deviation;
    EXPECT_GT(ratio, 2.0 * 0.7);
    EXPECT_LT(ratio, 2.0 * 1.3);
  }
}

TEST(Ergodic, DeterministicDataHasNoSubBandSpread) {
  const std::vector<Vec3> dirs = {{0, 0, 1}};
  const FarFieldSet ff = make_set(dirs, 4.0, 0.0625, 200, [](std::size_t, double) { return Complex{2.0}; });
  const std::vector<double> starts = {4.0, 5.0, 6.0};
  for (const auto& b : ergodic_diagnostic(ff, 0.0, 0.0, dirs[0], starts)) {
    EXPECT_NEAR(b.rms_deviation, 0.0, 1e-12);
    EXPECT_NEAR(b.mean, 4 * kPrefactor, 1e-10);
  }
}

TEST(Ergodic, InsufficientMesh) {
  const SyntheticProcess proc{1.0, 2.0, 1};
  const std::vector<BandMesh> bands = {{4, 16}, {4, 8}, {4, 64}};
  EXPECT_THROW(ergodic_diagnostic(proc, bands, 5), ConfigError);
  const std::vector<BandMesh> two = {{4, 16}, {4, 64}};
  EXPECT_THROW(ergodic_diagnostic(proc, two, 5), ConfigError);
}

TEST(Ergodic, MeshRefinementKeepsMean) {
  const SyntheticProcess proc{1.0, 2.5, 99};
  const std::vector<Vec3> dirs = {{0, 0, 1}};
  const int reps = 200;
  auto run = [&](std::size_t n) {
    double s = 0, s2 = 0;
    for (int r = 0; r < reps; ++r) {
      const FarFieldSet ff =
          make_set(dirs, 8.0, 8.0 / n, n, [&](std::size_t, double k) { return proc.sample(r + 1000 * n, k); });
      const double v = band_correlation(ff, 2.5, 0.0, dirs[0], 8.0).value.real();
      s += v;
      s2 += v * v;
    }
    const double mean = s / reps;
    return std::pair{mean, std::sqrt((s2 / reps - mean * mean) / (reps - 1))};
  };
  const auto [coarse, se_c] = run(64);
  const auto [fine, se_f] = run(128);
  EXPECT_LT(std::abs(fine - coarse), 2.0 * std::hypot(se_c, se_f));
}

TEST(Nearfield, Examples) {
  std::vector<NearfieldSample> zero, unit;
  const double m = 2.5;
  for (int j = 0; j <= 100; ++j) {
    const double k = 1.0 + 0.1 * j;
    zero.push_back({k, {}});
    unit.push_back({k, std::pow(k, -(1 + m) / 2)});
  }
  EXPECT_EQ(nearfield_second_moment(zero, m), 0.0);
  EXPECT_NEAR(nearfield_second_moment(unit, m), 1.0, 1e-12);
  unit.erase(unit.begin() + 50);
  EXPECT_THROW(nearfield_second_moment(unit, m), CoverageError);
}
