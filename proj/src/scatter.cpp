#include "rscat/scatter.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>

#include "rscat/fft.hpp"

namespace rscat {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

bool all_zero(const ScalarField& f) {
  return std::ranges::all_of(f.values(), [](double v) { return v == 0.0; });
}

bool all_zero(const ComplexField& f) {
  return std::ranges::all_of(f.values(), [](const Complex& v) { return v == Complex{}; });
}

// e^{-i k c (origin_a + n h)} for n = 0..N-1 along one axis.
std::vector<Complex> axis_phases(double kc, double origin, double h, std::size_t n) {
  std::vector<Complex> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::polar(1.0, -kc * (origin + h * static_cast<double>(i)));
  }
  return out;
}

struct SparseDensity {
  std::vector<Index3> nodes;
  std::vector<Complex> values;
};

SparseDensity sparsify(const ComplexField& g) {
  SparseDensity out;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (g[idx] == Complex{}) continue;
    out.nodes.push_back(g.grid().unflatten(idx));
    out.values.push_back(g[idx]);
  }
  return out;
}

}  // namespace

Complex fundamental_solution(double k, double r) {
  if (!(r > 0.0)) throw DomainError("fundamental_solution: r must be positive");
  return std::polar(1.0 / (kFourPi * r), k * r);
}

Complex ball_integral(double k, double rho) {
  const Complex ikr(0.0, k * rho);
  if (std::abs(k * rho) < 0.1) {
    // series of ρ² Σ (ikρ)^n / (n! (n+2)); the closed form cancels badly here
    Complex sum{}, term{1.0, 0.0};
    for (int n = 0; n < 12; ++n) {
      sum += term / static_cast<double>(n + 2);
      term *= ikr / static_cast<double>(n + 1);
    }
    return rho * rho * sum;
  }
  return (std::exp(ikr) * (1.0 - ikr) - 1.0) / (k * k);
}

double equal_volume_radius(double spacing) {
  return spacing * std::cbrt(3.0 / (4.0 * std::numbers::pi));
}

Resolvent::Resolvent(const GridSpec& grid, double k, std::size_t collar_cells)
    : grid_(grid), k_(k), collar_(collar_cells) {
  const auto& d = grid_.dims();
  padded_ = {2 * d[0], 2 * d[1], 2 * d[2]};
  const double h = grid_.spacing();
  const double h3 = grid_.cell_volume();
  kernel_hat_.assign(padded_[0] * padded_[1] * padded_[2], Complex{});
  auto offset = [](std::size_t a, std::size_t p) {
    return a < p / 2 ? static_cast<double>(a) : static_cast<double>(a) - static_cast<double>(p);
  };
  std::size_t idx = 0;
  for (std::size_t a = 0; a < padded_[0]; ++a) {
    const double ox = offset(a, padded_[0]);
    for (std::size_t b = 0; b < padded_[1]; ++b) {
      const double oy = offset(b, padded_[1]);
      for (std::size_t c = 0; c < padded_[2]; ++c, ++idx) {
        const double oz = offset(c, padded_[2]);
        const double r = h * std::sqrt(ox * ox + oy * oy + oz * oz);
        kernel_hat_[idx] = r > 0.0 ? fundamental_solution(k_, r) * h3
                                   : ball_integral(k_, equal_volume_radius(h));
      }
    }
  }
  detail::dft_inplace(kernel_hat_, padded_, true);
  const double scale = 1.0 / static_cast<double>(kernel_hat_.size());
  for (auto& v : kernel_hat_) v *= scale;
}

ComplexField Resolvent::convolve(const ComplexField& phi) const {
  const auto& d = grid_.dims();
  std::vector<Complex> buf(kernel_hat_.size(), Complex{});
  for (std::size_t i = 0; i < d[0]; ++i) {
    for (std::size_t j = 0; j < d[1]; ++j) {
      const Complex* src = &phi.at(i, j, 0);
      std::copy(src, src + d[2], buf.begin() + static_cast<std::ptrdiff_t>((i * padded_[1] + j) * padded_[2]));
    }
  }
  detail::dft_inplace(buf, padded_, true);
  for (std::size_t n = 0; n < buf.size(); ++n) buf[n] *= kernel_hat_[n];
  detail::dft_inplace(buf, padded_, false);
  ComplexField out(grid_);
  for (std::size_t i = 0; i < d[0]; ++i) {
    for (std::size_t j = 0; j < d[1]; ++j) {
      const auto start = buf.begin() + static_cast<std::ptrdiff_t>((i * padded_[1] + j) * padded_[2]);
      std::copy(start, start + static_cast<std::ptrdiff_t>(d[2]), &out.at(i, j, 0));
    }
  }
  return out;
}

ComplexField Resolvent::apply(const ComplexField& phi) const {
  if (!(phi.grid() == grid_)) throw ConfigError("resolvent: field grid does not match");
  if (!vanishes_on_collar(phi, collar_)) {
    throw ConfigError("resolvent: input must vanish on a " + std::to_string(collar_) +
                      "-cell boundary collar");
  }
  return convolve(phi);
}

ComplexField resolvent_apply(double k, const ComplexField& phi) {
  return Resolvent(phi.grid(), k).apply(phi);
}

ComplexField incident_plane_wave(double k, const Vec3& d, const GridSpec& grid) {
  if (!is_unit(d)) throw ConfigError("incident direction must be a unit vector");
  ComplexField out(grid);
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    out[idx] = std::polar(1.0, k * dot(d, grid.position(idx)));
  }
  return out;
}

void ScatteringConfig::validate() const {
  if (!(k > 0.0)) throw ConfigError("scattering: k must be positive");
  if (alpha != 0 && alpha != 1) throw ConfigError("scattering: alpha must be 0 or 1");
  if (alpha == 1 && !is_unit(direction)) throw ConfigError("scattering: |d| must equal 1 within 1e-12");
  if (!(tol > 0.0)) throw ConfigError("scattering: tol must be positive");
  if (max_born_order < 1) throw ConfigError("scattering: max_born_order must be >= 1");
  for (const auto* f : {&potential, &source}) {
    if (!*f) continue;
    if (!((*f)->grid() == grid)) throw ConfigError("scattering: field grid does not match config grid");
    if (!vanishes_on_collar(**f, collar_cells)) {
      throw ConfigError("scattering: " + std::string(f == &potential ? "potential" : "source") +
                        " must vanish on a " + std::to_string(collar_cells) + "-cell collar");
    }
  }
}

namespace {

bool has_potential(const ScatteringConfig& cfg) { return cfg.potential && !all_zero(*cfg.potential); }

ComplexField multiply(const ScalarField& q, const ComplexField& u) {
  ComplexField out(u.grid());
  for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] = q[idx] * u[idx];
  return out;
}

ComplexField rhs_density(const ScatteringConfig& cfg) {
  ComplexField g(cfg.grid);
  if (cfg.source) {
    for (std::size_t idx = 0; idx < g.size(); ++idx) g[idx] = (*cfg.source)[idx];
  }
  if (cfg.alpha == 1 && has_potential(cfg)) {
    const ComplexField uin = incident_plane_wave(cfg.k, cfg.direction, cfg.grid);
    for (std::size_t idx = 0; idx < g.size(); ++idx) g[idx] += (*cfg.potential)[idx] * uin[idx];
  }
  return g;
}

ComplexField add(const ComplexField& a, const ComplexField& b) {
  ComplexField out(a.grid());
  for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] = a[idx] + b[idx];
  return out;
}

double relative_difference(const ComplexField& a, const ComplexField& b) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    num += std::norm(a[idx] - b[idx]);
    den += std::norm(a[idx]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace

ScatteringSolution lippmann_schwinger_solve(const ScatteringConfig& cfg) {
  cfg.validate();
  return lippmann_schwinger_solve(cfg, Resolvent(cfg.grid, cfg.k, cfg.collar_cells));
}

ScatteringSolution lippmann_schwinger_solve(const ScatteringConfig& cfg, const Resolvent& resolvent) {
  cfg.validate();
  if (resolvent.k() != cfg.k || !(resolvent.grid() == cfg.grid)) {
    throw ConfigError("scattering: resolvent does not match config (k or grid)");
  }
  ConvergenceReport report;
  const ComplexField density = rhs_density(cfg);
  if (all_zero(density)) {
    report.converged = true;
    return {ComplexField(cfg.grid), report};
  }
  const ComplexField rhs = resolvent.apply(density);
  ComplexField u = rhs;
  if (!has_potential(cfg)) {
    // R_k M_q vanishes: the Neumann series stops after its first term.
    report.updates.push_back(0.0);
    report.iterations = 1;
    report.converged = true;
    return {std::move(u), report};
  }
  const ScalarField& q = *cfg.potential;
  for (int it = 1; it <= cfg.max_born_order; ++it) {
    ComplexField next = add(rhs, resolvent.apply(multiply(q, u)));
    const double update = relative_difference(next, u);
    u = std::move(next);
    report.updates.push_back(update);
    report.iterations = it;
    const auto n = report.updates.size();
    if (n >= 2 && report.updates[n - 2] > 0.0) report.contraction = update / report.updates[n - 2];
    if (update < cfg.tol) {
      report.converged = true;
      return {std::move(u), report};
    }
    if (it >= 3 && report.contraction >= 1.0 && update > 1e-12) {
      std::ostringstream msg;
      msg << "Born iteration diverges at k=" << cfg.k << ": contraction factor " << report.contraction
          << " after " << it << " iterations";
      throw DivergenceError(msg.str(), report.contraction);
    }
  }
  std::ostringstream msg;
  msg << "Born iteration did not reach tol=" << cfg.tol << " in " << cfg.max_born_order
      << " iterations at k=" << cfg.k << " (last update " << report.updates.back() << ")";
  throw ConvergenceError(msg.str(), report.updates.back());
}

double fixed_point_residual(const ScatteringConfig& cfg, const Resolvent& resolvent,
                            const ComplexField& u_sc) {
  ComplexField rhs = resolvent.apply(rhs_density(cfg));
  if (cfg.potential) rhs = add(rhs, resolvent.apply(multiply(*cfg.potential, u_sc)));
  return relative_difference(u_sc, rhs);
}

ComplexField radiating_density(const ScatteringConfig& cfg, const ComplexField& u_sc) {
  ComplexField g(cfg.grid);
  if (cfg.source) {
    for (std::size_t idx = 0; idx < g.size(); ++idx) g[idx] = (*cfg.source)[idx];
  }
  if (cfg.potential && !all_zero(*cfg.potential)) {
    std::optional<ComplexField> uin;
    if (cfg.alpha == 1) uin = incident_plane_wave(cfg.k, cfg.direction, cfg.grid);
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      const double q = (*cfg.potential)[idx];
      if (q == 0.0) continue;
      const Complex total = (uin ? (*uin)[idx] : Complex{}) + u_sc[idx];
      g[idx] += q * total;
    }
  }
  return g;
}

std::vector<Complex> far_field(const ScatteringConfig& cfg, const ComplexField& u_sc,
                               std::span<const Vec3> dirs) {
  const SparseDensity g = sparsify(radiating_density(cfg, u_sc));
  const GridSpec& grid = cfg.grid;
  const double h = grid.spacing();
  const auto& d = grid.dims();
  const double scale = grid.cell_volume() / kFourPi;
  std::vector<Complex> out;
  out.reserve(dirs.size());
  for (const Vec3& xhat : dirs) {
    if (!is_unit(xhat)) throw ConfigError("far_field: directions must be unit vectors");
    const auto px = axis_phases(cfg.k * xhat.x, grid.origin().x, h, d[0]);
    const auto py = axis_phases(cfg.k * xhat.y, grid.origin().y, h, d[1]);
    const auto pz = axis_phases(cfg.k * xhat.z, grid.origin().z, h, d[2]);
    Complex sum{};
    for (std::size_t n = 0; n < g.nodes.size(); ++n) {
      const auto& [i, j, l] = g.nodes[n];
      sum += g.values[n] * (px[i] * py[j] * pz[l]);
    }
    out.push_back(sum * scale);
  }
  return out;
}

Complex near_field_point(const ScatteringConfig& cfg, const ComplexField& u_sc, const Vec3& x) {
  const SparseDensity g = sparsify(radiating_density(cfg, u_sc));
  const GridSpec& grid = cfg.grid;
  Complex sum{};
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    const auto& [i, j, l] = g.nodes[n];
    const double r = norm(x - grid.position(i, j, l));
    if (r < 0.5 * grid.spacing()) {
      throw DomainError("near_field_point: evaluation point lies on the radiating density");
    }
    sum += g.values[n] * fundamental_solution(cfg.k, r);
  }
  return sum * grid.cell_volume();
}

Complex born_far_field(const ScalarField& q, double k, const Vec3& xhat, const Vec3& d) {
  const GridSpec& grid = q.grid();
  const Vec3 w = xhat - d;
  Complex sum{};
  for (std::size_t idx = 0; idx < q.size(); ++idx) {
    if (q[idx] == 0.0) continue;
    sum += q[idx] * std::polar(1.0, -k * dot(w, grid.position(idx)));
  }
  return sum * (grid.cell_volume() / kFourPi);
}

RealizedIngredients realize(const SweepTemplate& tmpl, std::uint64_t seed) {
  auto resolve = [&](const std::optional<Ingredient>& ing, std::uint64_t s) -> std::optional<ScalarField> {
    if (!ing) return std::nullopt;
    if (const auto* f = std::get_if<ScalarField>(&*ing)) return *f;
    return synthesize_migr(std::get<MigrSpec>(*ing), s).field;
  };
  RealizedIngredients out{resolve(tmpl.source, seed), resolve(tmpl.potential, potential_seed(seed))};
  for (const auto* f : {&out.source, &out.potential}) {
    if (*f && !((*f)->grid() == tmpl.grid)) throw ConfigError("sweep: ingredient grid does not match");
  }
  return out;
}

ScatteringConfig make_config(const SweepTemplate& tmpl, const RealizedIngredients& fields, double k,
                             int alpha, const Vec3& d) {
  ScatteringConfig cfg(tmpl.grid);
  cfg.k = k;
  cfg.alpha = alpha;
  cfg.direction = d;
  cfg.potential = fields.potential;
  cfg.source = fields.source;
  cfg.max_born_order = tmpl.max_born_order;
  cfg.tol = tmpl.tol;
  cfg.collar_cells = tmpl.collar_cells;
  return cfg;
}

std::optional<Vec3> separating_normal(const ScalarField& f, const ScalarField& q) {
  const SupportBox a = support_box(f);
  const SupportBox b = support_box(q);
  if (a.empty || b.empty) return std::nullopt;
  Vec3 gap;
  auto axis_gap = [](double alo, double ahi, double blo, double bhi) {
    if (blo > ahi) return blo - ahi;
    if (alo > bhi) return bhi - alo;
    return 0.0;
  };
  gap.x = axis_gap(a.lo.x, a.hi.x, b.lo.x, b.hi.x);
  gap.y = axis_gap(a.lo.y, a.hi.y, b.lo.y, b.hi.y);
  gap.z = axis_gap(a.lo.z, a.hi.z, b.lo.z, b.hi.z);
  if (norm(gap) == 0.0) return std::nullopt;
  return normalized(gap);
}

namespace {

template <class Fn>
void annotate(double k, const Vec3& d, Fn&& fn) {
  auto where = [&] {
    std::ostringstream s;
    s << " [k=" << k << ", dir=(" << d.x << ", " << d.y << ", " << d.z << ")]";
    return s.str();
  };
  try {
    fn();
  } catch (const DivergenceError& e) {
    throw DivergenceError(e.what() + where(), e.contraction());
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(e.what() + where(), e.last_update());
  } catch (const NumericError& e) {
    throw NumericError(e.what() + where());
  } catch (const ConfigError& e) {
    throw ConfigError(e.what() + where());
  }
}

}  // namespace

FarFieldSet band_sweep(const SweepTemplate& tmpl, std::span<const double> frequencies,
                       std::span<const Vec3> dirs, Acquisition mode, std::uint64_t seed) {
  if (frequencies.size() < 2) throw ConfigError("sweep: need at least two frequencies");
  if (dirs.empty()) throw ConfigError("sweep: need at least one direction");
  const double delta = frequencies[1] - frequencies[0];
  for (std::size_t n = 0; n < frequencies.size(); ++n) {
    if (!(frequencies[n] > 0.0)) throw ConfigError("sweep: frequencies must be positive");
    const double expected = frequencies[0] + static_cast<double>(n) * delta;
    if (!(delta > 0.0) || std::abs(frequencies[n] - expected) > 1e-9 * delta) {
      throw ConfigError("sweep: frequencies must be strictly increasing with uniform spacing");
    }
  }
  for (const Vec3& d : dirs) {
    if (!is_unit(d)) throw ConfigError("sweep: directions must be unit vectors");
  }

  const RealizedIngredients fields = realize(tmpl, seed);
  FarFieldMeta meta;
  meta.kind = mode;
  meta.seed = seed;
  meta.band_lo = frequencies.front();
  meta.band_hi = frequencies.back();
  meta.delta = delta;
  const auto& random_part = mode == Acquisition::passive ? tmpl.source : tmpl.potential;
  if (random_part) {
    if (const auto* spec = std::get_if<MigrSpec>(&*random_part)) meta.m = spec->order;
  }
  const bool both_random = tmpl.source && tmpl.potential &&
                           std::holds_alternative<MigrSpec>(*tmpl.source) &&
                           std::holds_alternative<MigrSpec>(*tmpl.potential);
  if (both_random) {
    meta.normal = separating_normal(*fields.source, *fields.potential);
    if (!meta.normal) {
      throw ConfigError(
          "sweep: support boxes of the random source and potential must be at positive distance");
    }
  }

  const std::size_t nk = frequencies.size();
  const std::size_t nd = dirs.size();
  std::vector<Complex> values(nk * nd);
  const bool needs_solve = fields.potential && !all_zero(*fields.potential);
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic)
  for (std::size_t ik = 0; ik < nk; ++ik) {
    if (failure) continue;
    try {
      const double k = frequencies[ik];
      std::optional<Resolvent> resolvent;
      if (needs_solve) resolvent.emplace(tmpl.grid, k, tmpl.collar_cells);
      const ComplexField zero(tmpl.grid);
      if (mode == Acquisition::passive) {
        const ScatteringConfig cfg = make_config(tmpl, fields, k, 0, Vec3{0.0, 0.0, 1.0});
        annotate(k, dirs[0], [&] {
          const ComplexField usc = needs_solve ? lippmann_schwinger_solve(cfg, *resolvent).scattered : zero;
          const auto ff = far_field(cfg, usc, dirs);
          std::copy(ff.begin(), ff.end(), values.begin() + static_cast<std::ptrdiff_t>(ik * nd));
        });
      } else {
        for (std::size_t id = 0; id < nd; ++id) {
          const ScatteringConfig cfg = make_config(tmpl, fields, k, 1, -dirs[id]);
          annotate(k, dirs[id], [&] {
            const ComplexField usc = needs_solve ? lippmann_schwinger_solve(cfg, *resolvent).scattered : zero;
            values[ik * nd + id] = far_field(cfg, usc, std::span(&dirs[id], 1)).front();
          });
        }
      }
    } catch (...) {
#pragma omp critical(rscat_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<FarFieldEntry> entries;
  entries.reserve(nk * nd);
  for (std::size_t ik = 0; ik < nk; ++ik) {
    for (std::size_t id = 0; id < nd; ++id) entries.push_back({dirs[id], frequencies[ik], values[ik * nd + id]});
  }
  return FarFieldSet(std::move(meta), std::move(entries));
}

std::vector<Vec3> fibonacci_sphere(std::size_t count) {
  std::vector<Vec3> out;
  out.reserve(count);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    out.push_back(normalized(Vec3{r * std::cos(phi), r * std::sin(phi), z}));
  }
  return out;
}

}  // namespace rscat
