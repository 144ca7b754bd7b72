#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rscat/farfield_set.hpp"
#include "rscat/scatter.hpp"

namespace rscat {

enum class IngredientKind { migr, deterministic };

struct ShapeConfig {
  std::string shape;  // gaussian-bump | ball-indicator | rsgf
  Vec3 center;
  double amplitude = 1.0;
  double width = 0.0;       // gaussian-bump
  double cutoff = 4.0;      // gaussian-bump, in widths
  double radius = 0.0;      // ball-indicator
  std::filesystem::path file;  // rsgf
};

/// [source] or [potential]: a migr law (shape gives μ) or a deterministic field.
struct IngredientConfig {
  std::string section;
  IngredientKind kind = IngredientKind::deterministic;
  double m = 0.0;
  ShapeConfig shape;
  double mean_amplitude = 0.0;  // mean = shape rescaled to this amplitude
  std::size_t collar = 4;

  /// μ for migr ingredients, the field itself for deterministic ones.
  ScalarField shape_field(const GridSpec& grid) const;
  Ingredient build(const GridSpec& grid) const;
};

struct BandConfig {
  double K = 0.0;
  double delta = 0.0;
  std::size_t n_freq = 0;
  std::vector<double> taus;

  std::vector<double> frequencies() const;
};

struct DirectionsConfig {
  std::size_t count = 0;
  std::string distribution = "fibonacci-sphere";
  std::vector<Vec3> list;

  std::vector<Vec3> resolve() const;
};

struct SolverConfig {
  double tol = 1e-10;
  int max_born_order = 20;
};

struct NearfieldConfig {
  std::vector<Vec3> points;
  double K = 0.0;  // mesh covers [1, K]
  std::size_t n_freq = 0;
};

struct DiagnosticConfig {
  std::vector<double> bands;  // band starts K
  double tau = 0.0;
  std::size_t dir_index = 0;
};

struct ExperimentConfig {
  explicit ExperimentConfig(GridSpec g) : grid(std::move(g)) {}

  GridSpec grid;
  std::optional<IngredientConfig> source;
  std::optional<IngredientConfig> potential;
  BandConfig band;
  DirectionsConfig directions;
  Acquisition mode = Acquisition::passive;
  std::uint64_t seed = 0;
  std::filesystem::path output;
  SolverConfig solver;
  std::optional<NearfieldConfig> nearfield;
  std::optional<DiagnosticConfig> diagnostic;
  std::string hash;  // FNV-1a of the config text, 16 hex digits

  SweepTemplate sweep_template() const;
  /// Separating normal when both ingredients are present.
  std::optional<Vec3> normal() const;
};

/// Parses the INI-style format: [section] headers, key = value lines, '#' or
/// ';' comments. Unknown sections and keys are errors; messages name the key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string fnv1a_hex(const std::string& text);

}  // namespace rscat
