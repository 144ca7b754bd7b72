#include "rscat/migr.hpp"

#include <algorithm>
#include <bit>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "rscat/fft.hpp"
#include "rscat/rng.hpp"
#include "rscat/spectral.hpp"

namespace rscat {

namespace {

bool admissible_order(double m) { return m == 0.0 || (m >= 2.0 && m < 4.0); }

std::size_t node_of(const GridSpec& g, const Vec3& p) {
  const auto node = g.nearest_node(p);
  if (!node) {
    std::ostringstream msg;
    msg << "point (" << p.x << ", " << p.y << ", " << p.z << ") is not strictly inside the box";
    throw ConfigError(msg.str());
  }
  return g.flat((*node)[0], (*node)[1], (*node)[2]);
}

class Fnv1a {
 public:
  void add_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001B3ULL;
    }
  }
  template <class T>
  void add(const T& v) {
    add_bytes(&v, sizeof(T));
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xCBF29CE484222325ULL;
};

}  // namespace

MigrSpec::MigrSpec(double m, ScalarField mu, ScalarField mean_field, std::size_t collar)
    : order(m), strength(std::move(mu)), mean(std::move(mean_field)), collar_cells(collar) {}

MigrSpec::MigrSpec(double m, ScalarField mu) : MigrSpec(m, mu, ScalarField(mu.grid())) {}

void MigrSpec::validate() const {
  if (!admissible_order(order)) {
    throw ConfigError("rough order m=" + std::to_string(order) + " outside {0} ∪ [2,4)");
  }
  if (!(mean.grid() == strength.grid())) throw ConfigError("mean and strength grids differ");
  for (double v : strength.values()) {
    if (v < 0.0) throw ConfigError("rough strength must be non-negative");
  }
  if (!vanishes_on_collar(strength, collar_cells)) {
    throw ConfigError("rough strength must vanish on a " + std::to_string(collar_cells) +
                      "-cell boundary collar");
  }
  if (!vanishes_on_collar(mean, collar_cells)) {
    throw ConfigError("mean must vanish on a " + std::to_string(collar_cells) + "-cell boundary collar");
  }
  const SupportBox mean_box = support_box(mean);
  if (!mean_box.empty) {
    const SupportBox mu_box = support_box(strength);
    const bool inside = !mu_box.empty && mean_box.lo.x >= mu_box.lo.x && mean_box.lo.y >= mu_box.lo.y &&
                        mean_box.lo.z >= mu_box.lo.z && mean_box.hi.x <= mu_box.hi.x &&
                        mean_box.hi.y <= mu_box.hi.y && mean_box.hi.z <= mu_box.hi.z;
    if (!inside) throw ConfigError("mean support must lie inside the bounding box of supp μ");
  }
}

std::uint64_t MigrSpec::fingerprint() const {
  Fnv1a h;
  h.add(order);
  h.add(collar_cells);
  const GridSpec& g = grid();
  for (int a = 0; a < 3; ++a) h.add(g.dims()[a]);
  h.add(g.origin().x);
  h.add(g.origin().y);
  h.add(g.origin().z);
  h.add(g.spacing());
  h.add_bytes(strength.values().data(), strength.size() * sizeof(double));
  h.add_bytes(mean.values().data(), mean.size() * sizeof(double));
  return h.value();
}

Realization synthesize_migr(const MigrSpec& spec, std::uint64_t seed) {
  spec.validate();
  const GridSpec& g = spec.grid();
  const double m = spec.order;
  if (m > 0.0 && !(std::pow(g.nyquist(), -m) < 1e-3)) {
    std::ostringstream msg;
    msg << "grid too coarse for rough order: m=" << m << ", h=" << g.spacing()
        << " gives symbol |ξ|^-m = " << std::pow(g.nyquist(), -m) << " at Nyquist (need < 1e-3)";
    throw ConfigError(msg.str());
  }

  auto gen = make_stream(seed);
  std::normal_distribution<double> normal;
  const double scale = std::pow(g.spacing(), -1.5);
  ComplexField noise(g);
  for (auto& v : noise.values()) v = Complex(normal(gen) * scale, 0.0);

  const ComplexField colored = fractional_laplacian(noise, -m / 2.0);

  double max_re = 0.0;
  double max_im = 0.0;
  for (const Complex& v : colored.values()) {
    max_re = std::max(max_re, std::abs(v.real()));
    max_im = std::max(max_im, std::abs(v.imag()));
  }
  if (max_im > 1e-10 * max_re) {
    throw NumericError("migr synthesis: imaginary residue " + std::to_string(max_im) +
                       " exceeds 1e-10 of the field maximum");
  }

  ScalarField out(g);
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    const double mu = spec.strength[idx];
    out[idx] = spec.mean[idx] + (mu > 0.0 ? std::sqrt(mu) * colored[idx].real() : 0.0);
  }
  return {std::move(out), seed, m, spec.fingerprint()};
}

std::vector<CovarianceEstimate> empirical_covariance(const MigrSpec& spec,
                                                     const std::vector<PointPair>& pairs,
                                                     std::size_t n_samples, std::uint64_t seed0) {
  if (n_samples < 2) throw ConfigError("empirical_covariance needs at least 2 samples");
  spec.validate();
  const GridSpec& g = spec.grid();
  std::vector<std::pair<std::size_t, std::size_t>> nodes;
  nodes.reserve(pairs.size());
  for (const auto& p : pairs) nodes.emplace_back(node_of(g, p.x), node_of(g, p.y));

  std::vector<double> sum(pairs.size(), 0.0);
  std::vector<double> sum_sq(pairs.size(), 0.0);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const Realization r = synthesize_migr(spec, sample_seed(seed0, s));
    for (std::size_t p = 0; p < nodes.size(); ++p) {
      const auto [a, b] = nodes[p];
      const double prod = (r.field[a] - spec.mean[a]) * (r.field[b] - spec.mean[b]);
      sum[p] += prod;
      sum_sq[p] += prod * prod;
    }
  }
  const auto n = static_cast<double>(n_samples);
  std::vector<CovarianceEstimate> out(pairs.size());
  for (std::size_t p = 0; p < out.size(); ++p) {
    const double mean = sum[p] / n;
    const double var = std::max(0.0, (sum_sq[p] - n * mean * mean) / (n - 1.0));
    out[p] = {mean, std::sqrt(var / n)};
  }
  return out;
}

SlopeFit spectral_slope(const MigrSpec& spec, std::size_t n_samples, std::uint64_t seed0) {
  if (spec.order < 0.0) throw ConfigError("spectral_slope needs m >= 0");
  if (n_samples < 1) throw ConfigError("spectral_slope needs at least one sample");
  const GridSpec& g = spec.grid();
  const auto& d = g.dims();
  const double step = 2.0 * std::numbers::pi /
                      (static_cast<double>(std::max({d[0], d[1], d[2]})) * g.spacing());
  const double lo = g.nyquist() / 40.0;
  const double hi = g.nyquist() / 4.0;
  const std::vector<Vec3> lattice = frequency_lattice(g);

  std::vector<double> power(g.size(), 0.0);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const Realization r = synthesize_migr(spec, sample_seed(seed0, s));
    ComplexField centered(g);
    for (std::size_t idx = 0; idx < g.size(); ++idx) centered[idx] = r.field[idx] - spec.mean[idx];
    const ComplexField spectrum = fft_forward(centered);
    for (std::size_t idx = 0; idx < g.size(); ++idx) power[idx] += std::norm(spectrum[idx]);
  }

  struct Bin {
    double rho_sum = 0.0;
    double power_sum = 0.0;
    std::size_t count = 0;
  };
  std::map<long, Bin> bins;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const double rho = norm(lattice[idx]);
    if (rho == 0.0) continue;
    const long shell = std::lround(rho / step);
    const double center = static_cast<double>(shell) * step;
    if (center < lo || center > hi) continue;
    Bin& b = bins[shell];
    b.rho_sum += rho;
    b.power_sum += power[idx];
    ++b.count;
  }
  if (bins.size() < 5) {
    throw ConfigError("spectral_slope: only " + std::to_string(bins.size()) +
                      " radial bins in [Nyquist/40, Nyquist/4]; need at least 5");
  }

  std::vector<double> xs, ys;
  for (const auto& [shell, b] : bins) {
    const auto c = static_cast<double>(b.count);
    xs.push_back(std::log(b.rho_sum / c));
    ys.push_back(std::log(b.power_sum / c / static_cast<double>(n_samples)));
  }
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + slope * (xs[i] - mx));
    rss += r * r;
  }
  const double se = std::sqrt(rss / (n - 2.0) / sxx);
  const boost::math::students_t dist(n - 2.0);
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  return {slope, t * se, xs.size()};
}

}  // namespace rscat
