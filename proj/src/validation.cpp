#include "rscat/validation.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "rscat/fft.hpp"
#include "rscat/migr.hpp"
#include "rscat/oracles.hpp"
#include "rscat/recovery.hpp"
#include "rscat/rng.hpp"
#include "rscat/rsgf.hpp"
#include "rscat/scatter.hpp"
#include "rscat/shapes.hpp"
#include "rscat/spectral.hpp"

namespace rscat {

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool passed;
  std::string detail;
};

std::string sci(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

Outcome below(double value, double limit) { return {value <= limit, sci(value) + " <= " + sci(limit)}; }

GridSpec cube(std::size_t n, double h) {
  const double half = 0.5 * static_cast<double>(n) * h;
  return GridSpec({n, n, n}, {-half, -half, -half}, h);
}

ComplexField random_complex(const GridSpec& g, std::uint64_t seed) {
  auto gen = make_stream(seed, 17);
  std::normal_distribution<double> normal;
  ComplexField f(g);
  for (auto& v : f.values()) v = {normal(gen), normal(gen)};
  return f;
}

double rel_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

// ---- field-core -----------------------------------------------------------

Outcome fft_unitary() {
  const ComplexField v = random_complex(cube(16, 0.1), 1);
  const double a = l2_norm(v.values());
  const double b = l2_norm(fft_forward(v).values());
  return below(std::abs(a - b) / a, 1e-12);
}

Outcome fft_roundtrip() {
  const ComplexField v = random_complex(cube(16, 0.1), 2);
  return below(rel_diff(fft_inverse(fft_forward(v)).values(), v.values()), 1e-12);
}

Outcome lattice_ordering() {
  const GridSpec g = cube(8, 0.25);
  const ComplexField v = random_complex(g, 3);
  const std::size_t s[3] = {3, 1, 6};
  const Vec3 a{s[0] * g.spacing(), s[1] * g.spacing(), s[2] * g.spacing()};
  ComplexField spec = fft_forward(v);
  const auto lattice = frequency_lattice(g);
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= std::polar(1.0, -dot(lattice[i], a));
  const ComplexField shifted = fft_inverse(spec);
  double worst = 0.0;
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      for (std::size_t l = 0; l < 8; ++l) {
        const Complex expect = v.at((i + 8 - s[0]) % 8, (j + 8 - s[1]) % 8, (l + 8 - s[2]) % 8);
        worst = std::max(worst, std::abs(shifted.at(i, j, l) - expect));
      }
  return below(worst, 1e-12);
}

Outcome rsgf_roundtrip() {
  auto gen = make_stream(4, 0);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int t = 0; t < 10000; ++t) {
    const GridSpec g({8, 8, 8}, {u(gen), u(gen), u(gen)}, 0.5 + std::abs(u(gen)) * 1e-6);
    std::vector<double> data(g.size());
    for (double& x : data) x = u(gen);
    const ScalarField f(g, data);
    const auto bytes = encode_field(f);
    const auto back = std::get<ScalarField>(decode_field(bytes));
    if (!(back.grid() == g) || back.vector() != data || encode_field(back) != bytes) {
      return {false, "mismatch at field " + std::to_string(t)};
    }
  }
  return {true, "10000 fields bit-exact"};
}

// ---- migr-synth -----------------------------------------------------------

MigrSpec small_migr(double m, double amplitude = 1.0) {
  const GridSpec g = cube(16, 0.1);
  return MigrSpec(m, ball_indicator(g, {0, 0, 0}, 0.35, amplitude), gaussian_bump(g, {0, 0, 0}, 0.2, 0.1, 3.0));
}

Outcome migr_support() {
  const MigrSpec spec = small_migr(2.5);
  const ScalarField f = synthesize_migr(spec, 11).field;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (spec.strength[i] == 0.0 && spec.mean[i] == 0.0 && f[i] != 0.0) return {false, "nonzero outside support"};
  }
  return {true, "zero outside supp mu and supp mean"};
}

Outcome migr_determinism() {
  const MigrSpec spec = small_migr(3.5);
  const bool same = encode_field(synthesize_migr(spec, 5).field) == encode_field(synthesize_migr(spec, 5).field);
  return {same, same ? "bit-identical" : "differs"};
}

Outcome migr_covariance_symmetry() {
  const MigrSpec spec = small_migr(2.5);
  const Vec3 x{0.1, 0.0, 0.0}, y{-0.1, 0.1, 0.0};
  const auto e = empirical_covariance(spec, {{x, y}, {y, x}}, 400, 100);
  const double diff = std::abs(e[0].value - e[1].value);
  const double se = std::hypot(e[0].std_error, e[1].std_error);
  return {diff <= 3.0 * se + 1e-14, sci(diff) + " <= 3*" + sci(se)};
}

Outcome migr_scaling() {
  const Vec3 x{0.1, 0.0, 0.0}, y{-0.1, 0.0, 0.1};
  const double a = empirical_covariance(small_migr(2.5, 1.0), {{x, y}}, 2000, 300)[0].value;
  const double b = empirical_covariance(small_migr(2.5, 2.0), {{x, y}}, 2000, 300)[0].value;
  const double ratio = b / a;
  return {ratio >= 1.8 && ratio <= 2.2, "ratio " + sci(ratio) + " in [1.8, 2.2]"};
}

Outcome migr_mean() {
  const MigrSpec spec = small_migr(2.5);
  const std::size_t n = 500;
  std::vector<double> sum(spec.grid().size(), 0.0), sum_sq(spec.grid().size(), 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    const ScalarField f = synthesize_migr(spec, sample_seed(900, s)).field;
    for (std::size_t i = 0; i < f.size(); ++i) {
      sum[i] += f[i];
      sum_sq[i] += f[i] * f[i];
    }
  }
  // RMS over random cells of the mean error in units of the empirical std.
  double acc = 0.0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < sum.size(); ++i) {
    const double mean = sum[i] / n;
    const double sd = std::sqrt(std::max(0.0, sum_sq[i] / n - mean * mean));
    const double err = std::abs(mean - spec.mean[i]);
    if (sd == 0.0) {
      if (err > 0.0) return {false, "deterministic cell off the mean"};
      continue;
    }
    acc += (err / sd) * (err / sd);
    ++cells;
  }
  const double rms = std::sqrt(acc / static_cast<double>(cells));
  return below(rms, 3.0 / std::sqrt(static_cast<double>(n)));
}

// ---- forward-scatter ------------------------------------------------------

Outcome resolvent_linearity() {
  const GridSpec g = cube(16, 0.1);
  const Resolvent R(g, 3.0);
  ComplexField a(g), b(g);
  auto gen = make_stream(6, 0);
  std::normal_distribution<double> n;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.in_collar(i, 4)) continue;
    a[i] = {n(gen), n(gen)};
    b[i] = {n(gen), n(gen)};
  }
  const Complex ca{1.5, -0.5}, cb{-2.0, 0.25};
  ComplexField mix(g);
  for (std::size_t i = 0; i < g.size(); ++i) mix[i] = ca * a[i] + cb * b[i];
  const ComplexField lhs = R.apply(mix);
  const ComplexField ra = R.apply(a), rb = R.apply(b);
  ComplexField rhs(g);
  for (std::size_t i = 0; i < g.size(); ++i) rhs[i] = ca * ra[i] + cb * rb[i];
  return below(rel_diff(lhs.values(), rhs.values()), 1e-12);
}

Outcome resolvent_delta() {
  const GridSpec g = cube(16, 0.1);
  const double k = 2.5;
  const ComplexField u = resolvent_apply(k, to_complex(discrete_delta(g, {0, 0, 0})));
  const Vec3 c = g.position(8, 8, 8);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = norm(g.position(i) - c);
    if (r < 3.0 * g.spacing() - 1e-12) continue;
    worst = std::max(worst, std::abs(u[i] - fundamental_solution(k, r)) / std::abs(fundamental_solution(k, r)));
  }
  return below(worst, 1e-12);
}

Outcome resolvent_outgoing() {
  const GridSpec g = cube(32, 0.1);
  const double k = 4.0;
  const ComplexField u = resolvent_apply(k, to_complex(discrete_delta(g, {0, 0, 0})));
  double worst = 0.0;
  for (std::size_t i = 11; i <= 14; ++i) {
    const double r = static_cast<double>(i) * g.spacing();
    const Complex v = u.at(16 + i, 16, 16) * (4.0 * kPi * r);
    worst = std::max(worst, std::abs(std::arg(v * std::polar(1.0, -k * r))));
  }
  return below(worst, 1e-10);
}

Outcome born_reciprocity() {
  const GridSpec g = cube(16, 0.1);
  const ScalarField q = gaussian_bump(g, {0.1, -0.05, 0.0}, 0.5, 0.15, 3.0);
  const Vec3 xhat = normalized(Vec3{1, 2, -0.5}), d = normalized(Vec3{-0.3, 0.4, 1.0});
  const Complex a = born_far_field(q, 3.0, xhat, d);
  const Complex b = born_far_field(q, 3.0, -d, -xhat);
  return below(std::abs(a - b) / std::abs(a), 1e-12);
}

Outcome source_linearity() {
  const GridSpec g = cube(16, 0.1);
  ScatteringConfig cfg(g);
  cfg.k = 3.0;
  cfg.source = gaussian_bump(g, {0, 0, 0}, 1.0, 0.1, 3.0);
  cfg.potential = gaussian_bump(g, {0.05, 0, 0}, 0.5, 0.08, 3.0);
  const Vec3 dir = normalized(Vec3{0.2, 0.3, 0.9});
  const Complex a = far_field(cfg, lippmann_schwinger_solve(cfg).scattered, std::span(&dir, 1))[0];
  for (double& v : cfg.source->values()) v *= 2.0;
  const Complex b = far_field(cfg, lippmann_schwinger_solve(cfg).scattered, std::span(&dir, 1))[0];
  return below(std::abs(b - 2.0 * a) / std::abs(2.0 * a), 1e-12);
}

Outcome neumann_truncation() {
  const GridSpec g = cube(16, 0.1);
  ScatteringConfig cfg(g);
  cfg.k = 2.0;
  cfg.source = gaussian_bump(g, {0, 0, 0}, 1.0, 0.1, 3.0);
  const ScatteringSolution s = lippmann_schwinger_solve(cfg);
  const ComplexField direct = resolvent_apply(2.0, to_complex(*cfg.source));
  const double d = rel_diff(s.scattered.values(), direct.values());
  return {d == 0.0 && s.report.updates.back() <= 1e-14, "difference " + sci(d)};
}

Outcome far_field_dual_path() {
  const GridSpec g = cube(16, 0.1);
  ScatteringConfig cfg(g);
  cfg.k = 5.0;
  cfg.source = gaussian_bump(g, {0.1, 0, -0.1}, 1.0, 0.15, 3.0);
  const Vec3 dir = normalized(Vec3{1, -1, 0.5});
  const Complex a = far_field(cfg, ComplexField(g), std::span(&dir, 1))[0];
  const Complex b = oracles::direct_farfield(*cfg.source, 5.0, dir);
  return below(std::abs(a - b) / std::abs(b), 1e-12);
}

// ---- stat-recovery --------------------------------------------------------

FarFieldSet random_set(std::uint64_t seed, double c) {
  FarFieldMeta meta;
  meta.band_lo = 4.0;
  meta.delta = 0.125;
  meta.band_hi = 4.0 + 0.125 * 80;
  auto gen = make_stream(seed, 5);
  std::normal_distribution<double> n;
  std::vector<FarFieldEntry> entries;
  const Vec3 dirs[2] = {{0, 0, 1}, {0, 0, -1}};
  for (const Vec3& d : dirs) {
    for (int j = 0; j <= 80; ++j) entries.push_back({d, 4.0 + 0.125 * j, c * Complex{n(gen), n(gen)}});
  }
  return FarFieldSet(meta, entries);
}

Outcome tau0_real() {
  const CorrelationEstimate e = band_correlation(random_set(7, 1.0), 2.5, 0.0, {0, 0, 1}, 4.0);
  return {e.value.imag() == 0.0 && e.value.real() >= 0.0, "value " + sci(e.value.real()) + " + " + sci(e.value.imag()) + "i"};
}

Outcome power_linearity() {
  const double c = -1.7;
  const Complex a = band_correlation(random_set(8, 1.0), 2.5, 0.5, {0, 0, 1}, 4.0).value;
  const Complex b = band_correlation(random_set(8, c), 2.5, 0.5, {0, 0, 1}, 4.0).value;
  return below(std::abs(b - c * c * a) / std::abs(c * c * a), 1e-14);
}

Outcome completion_symmetry() {
  const FarFieldSet ff = random_set(9, 1.0);
  std::vector<CorrelationEstimate> s = {band_correlation(ff, 2.5, 0.5, {0, 0, 1}, 4.0)};
  const auto full = hermitian_complete(s, {0, 0, 1});
  const bool ok = full.size() == 2 && full[1].dir == Vec3{0, 0, -1} && full[1].value == std::conj(full[0].value);
  return {ok, ok ? "mirror equals conj exactly" : "mirror mismatch"};
}

Outcome hermitian_reality() {
  const GridSpec g = cube(16, 0.125);
  std::vector<CorrelationEstimate> samples;
  const auto dirs = fibonacci_sphere(24);
  for (const Vec3& d : dirs) {
    for (int t = 0; t <= 8; ++t) {
      const double tau = 2.0 * t;
      CorrelationEstimate e;
      e.tau = tau;
      e.dir = d;
      e.value = std::exp(-0.01 * tau * tau) * std::polar(1.0, -tau * dot(d, Vec3{0.1, 0.0, -0.05}));
      samples.push_back(e);
    }
  }
  const Reconstruction r = reconstruct_from_polar(conjugate_complete(samples), g);
  return below(r.imaginary_ratio, 1e-10);
}

Outcome mesh_refinement() {
  const SyntheticProcess coarse{0.7, 2.5, 31}, fine{0.7, 2.5, 32};
  const BandMesh a[3] = {{8.0, 64}, {8.0, 64}, {8.0, 64}};
  const BandMesh b[3] = {{8.0, 128}, {8.0, 128}, {8.0, 128}};
  const auto ra = ergodic_diagnostic(coarse, a, 200);
  const auto rb = ergodic_diagnostic(fine, b, 200);
  const double se = std::hypot(ra[0].rms_deviation, rb[0].rms_deviation) / std::sqrt(200.0);
  const double diff = std::abs(ra[0].mean - rb[0].mean);
  return {diff <= 3.0 * se, sci(diff) + " <= 3*" + sci(se)};
}

// ---- oracles --------------------------------------------------------------

Outcome riesz_monotone() {
  double prev = INFINITY;
  for (int i = 0; i < 20; ++i) {
    const double r = 0.1 + 0.05 * i;
    const double v = oracles::riesz_kernel(2.5, r);
    if (!(v < prev)) return {false, "not decreasing at r=" + sci(r)};
    prev = v;
  }
  return {true, "decreasing on 20 radii"};
}

Outcome riesz_closed_form() {
  const double v = oracles::riesz_kernel(2.0, 0.5);
  return below(std::abs(v - 1.0 / (2.0 * kPi)) * 2.0 * kPi, 1e-8);
}

Outcome direct_farfield_linear() {
  const GridSpec g = cube(16, 0.1);
  const ScalarField a = gaussian_bump(g, {0, 0, 0}, 1.0, 0.15, 3.0);
  const ScalarField b = ball_indicator(g, {0.1, 0, 0}, 0.3, 2.0);
  ScalarField mix(g);
  for (std::size_t i = 0; i < g.size(); ++i) mix[i] = 3.0 * a[i] - 0.5 * b[i];
  const Vec3 d = normalized(Vec3{1, 1, 1});
  const Complex lhs = oracles::direct_farfield(mix, 4.0, d);
  const Complex rhs = 3.0 * oracles::direct_farfield(a, 4.0, d) - 0.5 * oracles::direct_farfield(b, 4.0, d);
  return below(std::abs(lhs - rhs) / std::abs(rhs), 1e-12);
}

}  // namespace

std::vector<CheckResult> run_validation_suite() {
  const std::vector<std::tuple<std::string, std::string, std::function<Outcome()>>> checks = {
      {"field-core", "fft unitary on 16^3", fft_unitary},
      {"field-core", "fft roundtrip", fft_roundtrip},
      {"field-core", "lattice ordering vs cyclic shift", lattice_ordering},
      {"field-core", "rsgf roundtrip x10^4", rsgf_roundtrip},
      {"migr-synth", "support of realizations", migr_support},
      {"migr-synth", "determinism", migr_determinism},
      {"migr-synth", "covariance symmetry", migr_covariance_symmetry},
      {"migr-synth", "covariance scales with mu", migr_scaling},
      {"migr-synth", "ensemble mean", migr_mean},
      {"forward-scatter", "resolvent linearity", resolvent_linearity},
      {"forward-scatter", "resolvent of a delta", resolvent_delta},
      {"forward-scatter", "outgoing phase along a ray", resolvent_outgoing},
      {"forward-scatter", "Born reciprocity", born_reciprocity},
      {"forward-scatter", "linearity in the source", source_linearity},
      {"forward-scatter", "Neumann series truncates at q=0", neumann_truncation},
      {"forward-scatter", "far field vs direct sum", far_field_dual_path},
      {"stat-recovery", "tau=0 estimate real and >= 0", tau0_real},
      {"stat-recovery", "c^2 scaling", power_linearity},
      {"stat-recovery", "conjugate completion", completion_symmetry},
      {"stat-recovery", "Hermitian reconstruction is real", hermitian_reality},
      {"stat-recovery", "mesh refinement stability", mesh_refinement},
      {"oracles", "riesz kernel decreasing", riesz_monotone},
      {"oracles", "riesz kernel at m=2", riesz_closed_form},
      {"oracles", "direct far field linear", direct_farfield_linear},
  };
  std::vector<CheckResult> out;
  for (const auto& [module, name, fn] : checks) {
    try {
      const Outcome o = fn();
      out.push_back({module, name, o.passed, o.detail});
    } catch (const std::exception& e) {
      out.push_back({module, name, false, std::string("threw: ") + e.what()});
    }
  }
  return out;
}

}  // namespace rscat
