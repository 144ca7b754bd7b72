#include "rscat/recovery.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "rscat/fft.hpp"
#include "rscat/rng.hpp"

namespace rscat {

namespace {

const double kPrefactor = 4.0 * std::sqrt(2.0 * std::numbers::pi);
constexpr double kMeshSlack = 1e-6;
constexpr std::size_t kMinTerms = 16;

std::optional<long> mesh_steps(double value, double delta) {
  const double t = value / delta;
  const double r = std::round(t);
  if (std::abs(t - r) > kMeshSlack) return std::nullopt;
  return static_cast<long>(r);
}

std::string gap_list(const std::vector<double>& gaps) {
  std::ostringstream s;
  const std::size_t shown = std::min<std::size_t>(gaps.size(), 8);
  for (std::size_t i = 0; i < shown; ++i) s << (i ? ", " : "") << format_double(gaps[i]);
  if (gaps.size() > shown) s << ", ... (" << gaps.size() << " missing in total)";
  return s.str();
}

CorrelationEstimate correlate(const FarFieldSet& ff, double m, double tau, double shift,
                              const Vec3& dir, double K, const char* what) {
  const FarFieldMeta& meta = ff.meta();
  if (!(tau >= 0.0)) throw ConfigError(std::string(what) + ": tau must be non-negative");
  if (!(K > 0.0)) throw ConfigError(std::string(what) + ": K must be positive");
  const auto n = mesh_steps(K, meta.delta);
  if (!n) throw ConfigError(std::string(what) + ": K=" + format_double(K) + " is not a multiple of the mesh spacing");
  if (static_cast<std::size_t>(*n) < kMinTerms) {
    throw ConfigError(std::string(what) + ": band [K, 2K] holds " + std::to_string(*n) +
                      " mesh points; need at least " + std::to_string(kMinTerms));
  }
  const auto s = mesh_steps(shift, meta.delta);
  if (!s) {
    throw ConfigError(std::string(what) + ": frequency shift " + format_double(shift) +
                      " for tau=" + format_double(tau) + " is not on the mesh (delta=" +
                      format_double(meta.delta) + ")");
  }
  const auto di = ff.find_direction(dir);
  if (!di) throw CoverageError(std::string(what) + ": direction not present in the far-field data");
  const auto start = ff.mesh_index(K);

  std::vector<double> gaps;
  auto fetch = [&](long j) -> Complex {
    const double k = K + static_cast<double>(j) * meta.delta;
    std::optional<Complex> v;
    if (start) v = ff.value(*di, *start + j);
    if (!v) {
      gaps.push_back(k);
      return {};
    }
    return *v;
  };

  Complex sum{};
  for (long j = 0; j < *n; ++j) {
    const double k = K + static_cast<double>(j) * meta.delta;
    const Complex a = fetch(j);
    const double w = std::pow(k, m);
    if (*s == 0) {
      sum += w * std::norm(a);
    } else {
      sum += w * std::conj(a) * fetch(j + *s);
    }
  }
  if (!gaps.empty()) {
    std::sort(gaps.begin(), gaps.end());
    gaps.erase(std::unique(gaps.begin(), gaps.end()), gaps.end());
    throw CoverageError(std::string(what) + ": far-field data missing at k = " + gap_list(gaps));
  }
  CorrelationEstimate out;
  out.tau = tau;
  out.dir = dir;
  out.band_lo = K;
  out.band_hi = 2.0 * K;
  out.value = kPrefactor * sum * (meta.delta / K);
  out.n_terms = static_cast<std::size_t>(*n);
  return out;
}

bool same_dir(const Vec3& a, const Vec3& b) { return norm(a - b) <= 1e-12; }

CorrelationEstimate mirror(const CorrelationEstimate& e) {
  CorrelationEstimate out = e;
  out.dir = -e.dir;
  out.value = std::conj(e.value);
  return out;
}

}  // namespace

CorrelationEstimate band_correlation(const FarFieldSet& ff, double m, double tau, const Vec3& dir,
                                     double K) {
  return correlate(ff, m, tau, tau, dir, K, "band_correlation");
}

CorrelationEstimate backscatter_correlation(const FarFieldSet& ff, double m, double tau,
                                            const Vec3& dir, double K) {
  return correlate(ff, m, tau, tau / 2.0, dir, K, "backscatter_correlation");
}

std::vector<CorrelationEstimate> hermitian_complete(const std::vector<CorrelationEstimate>& samples,
                                                    const Vec3& n) {
  if (!is_unit(n)) throw ConfigError("hermitian_complete: normal must be a unit vector");
  std::vector<CorrelationEstimate> out;
  out.reserve(2 * samples.size());
  for (const auto& e : samples) {
    const double side = dot(e.dir, n);
    if (side < -1e-12) {
      throw ConfigError("hermitian_complete: sample direction lies on the far side of the normal");
    }
    if (side > 1e-12) {
      out.push_back(e);
      out.push_back(mirror(e));
      continue;
    }
    const auto partner = std::find_if(samples.begin(), samples.end(), [&](const CorrelationEstimate& o) {
      return o.tau == e.tau && same_dir(o.dir, -e.dir);
    });
    if (partner == samples.end()) {
      std::ostringstream msg;
      msg << "hermitian_complete: missing mirror partner for equatorial sample at tau=" << e.tau
          << ", dir=(" << e.dir.x << ", " << e.dir.y << ", " << e.dir.z << ")";
      throw CoverageError(msg.str());
    }
    CorrelationEstimate avg = e;
    avg.value = 0.5 * (e.value + std::conj(partner->value));
    out.push_back(avg);  // the partner emits the conjugate of this value
  }
  return out;
}

std::vector<CorrelationEstimate> conjugate_complete(const std::vector<CorrelationEstimate>& samples) {
  std::vector<CorrelationEstimate> out;
  out.reserve(2 * samples.size());
  for (const auto& e : samples) {
    const auto partner = std::find_if(samples.begin(), samples.end(), [&](const CorrelationEstimate& o) {
      return o.tau == e.tau && same_dir(o.dir, -e.dir);
    });
    if (partner == samples.end()) {
      out.push_back(e);
      out.push_back(mirror(e));
    } else {
      CorrelationEstimate avg = e;
      avg.value = 0.5 * (e.value + std::conj(partner->value));
      out.push_back(avg);
    }
  }
  return out;
}

Reconstruction reconstruct_from_polar(const std::vector<CorrelationEstimate>& completed,
                                      const GridSpec& grid) {
  if (completed.empty()) throw ConfigError("reconstruction: no samples");
  std::vector<double> taus;
  std::vector<Vec3> dirs;
  for (const auto& e : completed) {
    if (std::find(taus.begin(), taus.end(), e.tau) == taus.end()) taus.push_back(e.tau);
    if (std::none_of(dirs.begin(), dirs.end(), [&](const Vec3& d) { return same_dir(d, e.dir); })) {
      dirs.push_back(e.dir);
    }
  }
  std::sort(taus.begin(), taus.end());
  std::vector<std::vector<std::optional<Complex>>> table(dirs.size(),
                                                         std::vector<std::optional<Complex>>(taus.size()));
  for (const auto& e : completed) {
    const auto d = static_cast<std::size_t>(
        std::find_if(dirs.begin(), dirs.end(), [&](const Vec3& v) { return same_dir(v, e.dir); }) - dirs.begin());
    const auto t = static_cast<std::size_t>(std::find(taus.begin(), taus.end(), e.tau) - taus.begin());
    table[d][t] = e.value;
  }
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    for (std::size_t t = 0; t < taus.size(); ++t) {
      if (!table[d][t]) {
        throw CoverageError("reconstruction: polar lattice incomplete at tau=" + format_double(taus[t]));
      }
    }
  }

  auto radial = [&](std::size_t d, double rho) -> Complex {
    if (rho <= taus.front()) return *table[d].front();
    const auto hi = static_cast<std::size_t>(std::upper_bound(taus.begin(), taus.end(), rho) - taus.begin());
    if (hi >= taus.size()) return *table[d].back();
    const std::size_t lo = hi - 1;
    const double w = (rho - taus[lo]) / (taus[hi] - taus[lo]);
    return (1.0 - w) * *table[d][lo] + w * *table[d][hi];
  };

  const std::vector<Vec3> lattice = frequency_lattice(grid);
  const double max_tau = taus.back();
  ComplexField spectrum(grid);
  const std::size_t neighbours = std::min<std::size_t>(3, dirs.size());

#pragma omp parallel for schedule(static)
  for (std::size_t idx = 0; idx < lattice.size(); ++idx) {
    const Vec3& xi = lattice[idx];
    const double rho = norm(xi);
    if (rho > max_tau * (1.0 + 1e-12)) continue;
    if (rho == 0.0) {
      Complex acc{};
      for (std::size_t d = 0; d < dirs.size(); ++d) acc += radial(d, 0.0);
      spectrum[idx] = acc / static_cast<double>(dirs.size());
      continue;
    }
    const Vec3 u = xi * (1.0 / rho);
    std::vector<std::pair<double, std::size_t>> angles(dirs.size());
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      angles[d] = {std::acos(std::clamp(dot(u, dirs[d]), -1.0, 1.0)), d};
    }
    std::partial_sort(angles.begin(), angles.begin() + static_cast<std::ptrdiff_t>(neighbours), angles.end());
    if (angles[0].first < 1e-9) {
      spectrum[idx] = radial(angles[0].second, rho);
      continue;
    }
    Complex acc{};
    double wsum = 0.0;
    for (std::size_t n = 0; n < neighbours; ++n) {
      const double w = 1.0 / angles[n].first;
      acc += w * radial(angles[n].second, rho);
      wsum += w;
    }
    spectrum[idx] = acc / wsum;
  }

  // Exact Hermitian symmetry on the lattice; Nyquist planes have no partner.
  const auto& dims = grid.dims();
  ComplexField sym(grid);
  for (std::size_t i = 0; i < dims[0]; ++i) {
    for (std::size_t j = 0; j < dims[1]; ++j) {
      for (std::size_t l = 0; l < dims[2]; ++l) {
        if (i == dims[0] / 2 || j == dims[1] / 2 || l == dims[2] / 2) continue;
        const Complex a = spectrum.at(i, j, l);
        const Complex b = spectrum.at((dims[0] - i) % dims[0], (dims[1] - j) % dims[1], (dims[2] - l) % dims[2]);
        sym.at(i, j, l) = 0.5 * (a + std::conj(b));
      }
    }
  }

  const Vec3& o = grid.origin();
  for (std::size_t idx = 0; idx < lattice.size(); ++idx) {
    sym[idx] *= std::polar(1.0, dot(lattice[idx], o));
  }
  const ComplexField field = fft_inverse(sym);
  const double two_pi = 2.0 * std::numbers::pi;
  const double dxi3 = std::pow(two_pi, 3) / (grid.side(0) * grid.side(1) * grid.side(2));
  const double scale = std::pow(two_pi, -1.5) * dxi3 * std::sqrt(static_cast<double>(grid.size()));

  Reconstruction out{ScalarField(grid), 0.0};
  double re2 = 0.0, im2 = 0.0;
  for (std::size_t idx = 0; idx < field.size(); ++idx) {
    const Complex v = field[idx] * scale;
    out.real_part[idx] = v.real();
    re2 += v.real() * v.real();
    im2 += v.imag() * v.imag();
  }
  out.imaginary_ratio = re2 > 0.0 ? std::sqrt(im2 / re2) : (im2 > 0.0 ? INFINITY : 0.0);
  return out;
}

Complex strength_transform(const ScalarField& mu, const Vec3& xi) {
  const GridSpec& g = mu.grid();
  Complex sum{};
  for (std::size_t idx = 0; idx < mu.size(); ++idx) {
    if (mu[idx] == 0.0) continue;
    sum += mu[idx] * std::polar(1.0, -dot(xi, g.position(idx)));
  }
  return sum * g.cell_volume() * std::pow(2.0 * std::numbers::pi, -1.5);
}

double relative_l2_on_support(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid())) throw ConfigError("relative error: grids differ");
  double num = 0.0, den = 0.0;
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    if (!(b[idx] > 0.0)) continue;
    num += (a[idx] - b[idx]) * (a[idx] - b[idx]);
    den += b[idx] * b[idx];
  }
  if (den == 0.0) throw ConfigError("relative error: reference has empty support");
  return std::sqrt(num / den);
}

namespace {

RecoveryReport assemble(const FarFieldSet& ff, const RecoveryRequest& req, bool backscatter) {
  if (req.taus.empty() || req.dirs.empty()) throw ConfigError("recovery: need taus and directions");
  if (req.normal && !is_unit(*req.normal)) throw ConfigError("recovery: normal must be a unit vector");
  std::vector<Vec3> dirs;
  for (const Vec3& d : req.dirs) {
    if (!req.normal || dot(d, *req.normal) >= -1e-12) dirs.push_back(d);
  }
  if (dirs.empty()) throw ConfigError("recovery: no direction on the hemisphere x.n >= 0");

  const double calibration = backscatter ? std::pow(2.0, req.m) : 1.0;
  std::vector<CorrelationEstimate> samples(dirs.size() * req.taus.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t n = 0; n < samples.size(); ++n) {
    if (failure) continue;
    try {
      const Vec3& d = dirs[n / req.taus.size()];
      const double tau = req.taus[n % req.taus.size()];
      samples[n] = backscatter ? backscatter_correlation(ff, req.m, tau, d, req.K)
                               : band_correlation(ff, req.m, tau, d, req.K);
      samples[n].value *= calibration;
    } catch (...) {
#pragma omp critical(rscat_recovery_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  const auto completed = req.normal ? hermitian_complete(samples, *req.normal) : conjugate_complete(samples);
  Reconstruction rec = reconstruct_from_polar(completed, req.grid);
  if (rec.imaginary_ratio >= 0.05) {
    throw NumericError("recovery: imaginary residue " + format_double(rec.imaginary_ratio) +
                       " of the real part exceeds 5%");
  }
  RecoveryReport report{samples, rec.real_part, rec.real_part, req.ground_truth, {}, {}, {}, rec.imaginary_ratio};
  if (req.ground_truth) {
    report.rel_l2_error = relative_l2_on_support(report.mu_unclipped, *req.ground_truth);
    double num = 0.0, den = 0.0;
    for (const auto& e : samples) {
      const Complex truth = strength_transform(*req.ground_truth, e.dir * e.tau);
      num += std::norm(e.value - truth);
      den += std::norm(truth);
    }
    report.spectral_rel_error = std::sqrt(num / den);
  }
  for (double& v : report.mu_rec.values()) v = std::max(v, 0.0);
  if (req.ground_truth) report.rel_l2_error_clipped = relative_l2_on_support(report.mu_rec, *req.ground_truth);
  return report;
}

}  // namespace

RecoveryReport recover_source_strength(const FarFieldSet& ff, const RecoveryRequest& req) {
  if (ff.meta().kind != Acquisition::passive) {
    throw ConfigError("recover_source_strength: far-field data is not passive");
  }
  return assemble(ff, req, false);
}

RecoveryReport recover_potential_strength(const FarFieldSet& ff, const RecoveryRequest& req) {
  if (ff.meta().kind != Acquisition::active_backscatter) {
    throw ConfigError("recover_potential_strength: far-field data is not active-backscatter");
  }
  return assemble(ff, req, true);
}

double nearfield_second_moment(std::span<const NearfieldSample> samples, double m) {
  if (samples.size() < 2) throw CoverageError("nearfield: need at least two frequencies");
  if (std::abs(samples.front().k - 1.0) > 1e-9) throw CoverageError("nearfield: mesh must start at k = 1");
  const double K = samples.back().k;
  const double delta = (K - 1.0) / static_cast<double>(samples.size() - 1);
  if (!(delta > 0.0)) throw CoverageError("nearfield: mesh must be increasing");
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const double expected = 1.0 + static_cast<double>(j) * delta;
    if (std::abs(samples[j].k - expected) > 1e-6 * delta) {
      throw CoverageError("nearfield: gap in the uniform mesh near k = " + format_double(expected));
    }
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const double w = (j == 0 || j + 1 == samples.size()) ? 0.5 : 1.0;
    sum += w * std::pow(samples[j].k, 1.0 + m) * std::norm(samples[j].value);
  }
  return sum * delta / (K - 1.0);
}

Complex SyntheticProcess::sample(std::size_t repetition, double k) const {
  auto gen = make_stream(mix64(seed ^ mix64(repetition)), std::bit_cast<std::uint64_t>(k));
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  const double re = normal(gen);
  const double im = normal(gen);
  return std::sqrt(c0 * std::pow(k, -m)) * Complex{re, im};
}

std::vector<BandSpread> ergodic_diagnostic(const SyntheticProcess& process,
                                           std::span<const BandMesh> bands, std::size_t n_rep) {
  if (bands.size() < 3) throw ConfigError("ergodic diagnostic: need at least 3 bands");
  if (n_rep < 2) throw ConfigError("ergodic diagnostic: need at least 2 repetitions");
  const double truth = kPrefactor * process.c0;
  std::vector<BandSpread> out;
  for (const BandMesh& b : bands) {
    if (b.n_terms < kMinTerms) throw ConfigError("ergodic diagnostic: insufficient mesh (fewer than 16 points)");
    const double delta = b.K / static_cast<double>(b.n_terms);
    double mean = 0.0, sq = 0.0;
    for (std::size_t r = 0; r < n_rep; ++r) {
      double sum = 0.0;
      for (std::size_t j = 0; j < b.n_terms; ++j) {
        const double k = b.K + static_cast<double>(j) * delta;
        sum += std::pow(k, process.m) * std::norm(process.sample(r, k));
      }
      const double est = kPrefactor * sum * delta / b.K;
      mean += est;
      sq += (est - truth) * (est - truth);
    }
    out.push_back({b.K, b.n_terms, mean / static_cast<double>(n_rep), std::sqrt(sq / static_cast<double>(n_rep))});
  }
  return out;
}

std::vector<BandSpread> ergodic_diagnostic(const FarFieldSet& ff, double m, double tau,
                                           const Vec3& dir, std::span<const double> band_starts) {
  if (band_starts.size() < 3) throw ConfigError("ergodic diagnostic: need at least 3 bands");
  constexpr int kSub = 4;
  std::vector<BandSpread> out;
  for (double K : band_starts) {
    // Sub-band [K + sK/4, K + (s+1)K/4) rescaled to an estimate of the same quantity.
    const double width = K / kSub;
    const auto nsub = mesh_steps(width, ff.meta().delta);
    if (!nsub || static_cast<std::size_t>(*nsub) < kMinTerms) {
      throw ConfigError("ergodic diagnostic: insufficient mesh in the sub-bands of K=" + format_double(K));
    }
    const CorrelationEstimate full = band_correlation(ff, m, tau, dir, K);
    std::vector<double> vals;
    const auto shift = mesh_steps(tau, ff.meta().delta);
    const auto di = ff.find_direction(dir);
    const auto start = ff.mesh_index(K);
    for (int s = 0; s < kSub; ++s) {
      Complex sum{};
      for (long j = 0; j < *nsub; ++j) {
        const long idx = *start + s * *nsub + j;
        const double k = ff.mesh_frequency(idx);
        sum += std::pow(k, m) * std::conj(*ff.value(*di, idx)) * *ff.value(*di, idx + *shift);
      }
      vals.push_back((kPrefactor * sum * ff.meta().delta / width).real());
    }
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= kSub;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    out.push_back({K, full.n_terms, full.value.real(), std::sqrt(var / (kSub - 1))});
  }
  return out;
}

void write_samples_csv(const std::filesystem::path& path, const std::vector<CorrelationEstimate>& samples) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "tau,dir_x,dir_y,dir_z,re,im\n";
  for (const auto& e : samples) {
    out << format_double(e.tau) << ',' << format_double(e.dir.x) << ',' << format_double(e.dir.y) << ','
        << format_double(e.dir.z) << ',' << format_double(e.value.real()) << ','
        << format_double(e.value.imag()) << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void write_summary(const std::filesystem::path& path, const RecoveryReport& report,
                   const std::map<std::string, std::string>& extra) {
  std::map<std::string, std::string> kv = extra;
  kv["samples"] = std::to_string(report.samples.size());
  kv["imaginary_ratio"] = format_double(report.imaginary_ratio);
  if (report.rel_l2_error) kv["rel_l2_error"] = format_double(*report.rel_l2_error);
  if (report.rel_l2_error_clipped) kv["rel_l2_error_clipped"] = format_double(*report.rel_l2_error_clipped);
  if (report.spectral_rel_error) kv["spectral_rel_error"] = format_double(*report.spectral_rel_error);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace rscat
