#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rscat/farfield_set.hpp"
#include "rscat/field.hpp"

namespace rscat {

/// Band-averaged estimate of the strength's Fourier transform at tau * dir.
struct CorrelationEstimate {
  double tau = 0.0;
  Vec3 dir;
  double band_lo = 0.0;  // K
  double band_hi = 0.0;  // 2K
  Complex value;
  std::size_t n_terms = 0;
};

/// 4√(2π) (1/K) Σ_j k_j^m conj(u∞(x̂,k_j)) u∞(x̂,k_j+τ) δ over k_j = K + jδ in [K, 2K).
CorrelationEstimate band_correlation(const FarFieldSet& ff, double m, double tau, const Vec3& dir,
                                     double K);

/// Same sum with the shift τ/2 used for backscatter data, without calibration.
CorrelationEstimate backscatter_correlation(const FarFieldSet& ff, double m, double tau,
                                            const Vec3& dir, double K);

/// Extends hemisphere samples (x̂·n ≥ 0) to the full sphere by conjugate
/// reflection; equatorial samples are averaged with their mirror partner.
std::vector<CorrelationEstimate> hermitian_complete(const std::vector<CorrelationEstimate>& samples,
                                                    const Vec3& n);

/// Adds the conjugate mirror of every sample; coincident mirrors are averaged.
std::vector<CorrelationEstimate> conjugate_complete(const std::vector<CorrelationEstimate>& samples);

struct Reconstruction {
  ScalarField real_part;
  double imaginary_ratio = 0.0;  // ‖Im‖₂ / ‖Re‖₂ before it is discarded
};

/// Interpolates full-sphere polar samples onto the grid's frequency lattice
/// and inverts with μ(x) = (2π)^{-3/2} ∫ μ̂(ξ) e^{iξ·x} dξ.
Reconstruction reconstruct_from_polar(const std::vector<CorrelationEstimate>& completed,
                                      const GridSpec& grid);

/// (2π)^{-3/2} Σ μ(y) e^{-iξ·y} h³ by direct summation.
Complex strength_transform(const ScalarField& mu, const Vec3& xi);

struct RecoveryRequest {
  double m = 0.0;
  std::vector<double> taus;
  std::vector<Vec3> dirs;
  double K = 0.0;
  std::optional<Vec3> normal;  // hemisphere mode when present
  GridSpec grid;
  std::optional<ScalarField> ground_truth;
};

struct RecoveryReport {
  std::vector<CorrelationEstimate> samples;  // estimated (not mirrored) samples
  ScalarField mu_rec;                        // clipped to μ ≥ 0
  ScalarField mu_unclipped;
  std::optional<ScalarField> ground_truth;
  std::optional<double> rel_l2_error;          // unclipped, over supp μ
  std::optional<double> rel_l2_error_clipped;  // clipped, over supp μ
  std::optional<double> spectral_rel_error;    // samples vs transform of the ground truth
  double imaginary_ratio = 0.0;
};

RecoveryReport recover_source_strength(const FarFieldSet& ff, const RecoveryRequest& req);

/// Backscatter samples are scaled by 2^{m}: at Born order the shifted
/// correlation of q̂(2kx̂) carries |2k|^{-m}, not k^{-m}.
RecoveryReport recover_potential_strength(const FarFieldSet& ff, const RecoveryRequest& req);

/// ‖a - b‖₂ / ‖b‖₂ over the cells where b > 0.
double relative_l2_on_support(const ScalarField& a, const ScalarField& b);

struct NearfieldSample {
  double k = 0.0;
  Complex value;
};

/// (1/(K-1)) ∫_1^K k^{1+m} |u^sc(x,k)|² dk by the trapezoid rule on a
/// uniform mesh starting at k = 1.
double nearfield_second_moment(std::span<const NearfieldSample> samples, double m);

struct BandSpread {
  double K = 0.0;
  std::size_t n_terms = 0;
  double mean = 0.0;           // mean estimate (real part)
  double rms_deviation = 0.0;  // around the known mean, or across sub-bands
};

/// Complex Gaussian process, independent across mesh points, with
/// E|u(k)|² = c0 k^{-m}. Draws are counter-based in (seed, repetition, k).
struct SyntheticProcess {
  double c0 = 1.0;
  double m = 0.0;
  std::uint64_t seed = 0;

  Complex sample(std::size_t repetition, double k) const;
};

struct BandMesh {
  double K = 0.0;
  std::size_t n_terms = 0;  // mesh points in [K, 2K); δ = K / n_terms
};

/// RMS deviation of the τ = 0 band estimate from its known mean 4√(2π) c0
/// over n_rep repetitions, per band.
std::vector<BandSpread> ergodic_diagnostic(const SyntheticProcess& process,
                                           std::span<const BandMesh> bands, std::size_t n_rep);

/// Spread of the estimate across four disjoint sub-bands of each [K, 2K].
std::vector<BandSpread> ergodic_diagnostic(const FarFieldSet& ff, double m, double tau,
                                           const Vec3& dir, std::span<const double> band_starts);

void write_samples_csv(const std::filesystem::path& path, const std::vector<CorrelationEstimate>& samples);

/// key=value summary of the report's metrics, merged with `extra`.
void write_summary(const std::filesystem::path& path, const RecoveryReport& report,
                   const std::map<std::string, std::string>& extra = {});

}  // namespace rscat
