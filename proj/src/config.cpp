#include "rscat/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rscat/rsgf.hpp"
#include "rscat/shapes.hpp"

namespace rscat {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"grid", {"dims", "spacing", "origin"}},
      {"source", {"type", "m", "shape", "center", "amplitude", "width", "cutoff", "radius", "file",
                  "mean_amplitude", "collar"}},
      {"potential", {"type", "m", "shape", "center", "amplitude", "width", "cutoff", "radius", "file",
                     "mean_amplitude", "collar"}},
      {"band", {"K", "delta", "n_freq", "tau_list"}},
      {"directions", {"count", "distribution", "list"}},
      {"experiment", {"mode", "seed", "output"}},
      {"solver", {"tol", "max_born_order"}},
      {"nearfield", {"points", "K", "n_freq"}},
      {"diagnostic", {"bands", "tau", "dir_index"}},
  };
  return keys;
}

class Section {
 public:
  Section(std::string name, const pt::ptree* tree) : name_(std::move(name)), tree_(tree) {}

  bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

  std::string raw(const std::string& key) const {
    if (!has(key)) throw ConfigError("missing key '" + name_ + "." + key + "'");
    return tree_->get<std::string>(key);
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    return has(key) ? raw(key) : fallback;
  }

  double number(const std::string& key) const { return to_number(raw(key), key); }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  std::uint64_t unsigned_integer(const std::string& key) const {
    const std::string v = raw(key);
    try {
      std::size_t used = 0;
      if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
      const auto out = std::stoull(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return out;
    } catch (const std::logic_error&) {
      throw ConfigError("key '" + name_ + "." + key + "' must be a non-negative integer, got '" + v + "'");
    }
  }
  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? unsigned_integer(key) : fallback;
  }

  std::vector<double> numbers(const std::string& key) const {
    std::string v = raw(key);
    for (char& c : v) {
      if (c == ',') c = ' ';
    }
    // start:step:stop expands to an inclusive arithmetic range.
    if (v.find(':') != std::string::npos) {
      std::stringstream ss(v);
      std::string a, b, c;
      std::getline(ss, a, ':');
      std::getline(ss, b, ':');
      std::getline(ss, c);
      const double start = to_number(trim(a), key), step = to_number(trim(b), key), stop = to_number(trim(c), key);
      if (!(step > 0.0) || stop < start) throw ConfigError("key '" + name_ + "." + key + "' has an empty range");
      std::vector<double> out;
      const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
      for (long i = 0; i <= count; ++i) out.push_back(start + static_cast<double>(i) * step);
      return out;
    }
    std::stringstream ss(v);
    std::vector<double> out;
    std::string tok;
    while (ss >> tok) out.push_back(to_number(tok, key));
    return out;
  }

  Vec3 vec3(const std::string& key) const {
    const auto v = numbers(key);
    if (v.size() != 3) throw ConfigError("key '" + name_ + "." + key + "' needs three numbers");
    return {v[0], v[1], v[2]};
  }

  std::vector<Vec3> vec3_list(const std::string& key) const {
    std::vector<Vec3> out;
    std::stringstream ss(raw(key));
    std::string item;
    std::size_t i = 0;
    while (std::getline(ss, item, ';')) {
      if (trim(item).empty()) continue;
      std::stringstream is(item);
      double c[3];
      std::string tok;
      int n = 0;
      for (; n < 3 && is >> tok; ++n) c[n] = to_number(tok, key + "[" + std::to_string(i) + "]");
      if (n != 3 || is >> tok) {
        throw ConfigError("key '" + name_ + "." + key + "[" + std::to_string(i) + "]' needs three numbers");
      }
      out.push_back({c[0], c[1], c[2]});
      ++i;
    }
    return out;
  }

  const std::string& name() const { return name_; }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
  }

  double to_number(const std::string& v, const std::string& key) const {
    try {
      std::size_t used = 0;
      const double out = std::stod(v, &used);
      if (used != v.size() || !std::isfinite(out)) throw std::invalid_argument(v);
      return out;
    } catch (const std::logic_error&) {
      throw ConfigError("key '" + name_ + "." + key + "' must be a number, got '" + v + "'");
    }
  }

  std::string name_;
  const pt::ptree* tree_;
};

GridSpec parse_grid(const Section& s) {
  const auto dims = s.numbers("dims");
  if (dims.size() != 1 && dims.size() != 3) throw ConfigError("key 'grid.dims' needs one or three integers");
  Dims d{};
  for (int a = 0; a < 3; ++a) {
    const double v = dims[dims.size() == 1 ? 0 : a];
    if (v < 1.0 || v != std::floor(v)) throw ConfigError("key 'grid.dims' must hold positive integers");
    d[a] = static_cast<std::size_t>(v);
  }
  const double h = s.number("spacing");
  Vec3 origin;
  if (s.has("origin")) {
    origin = s.vec3("origin");
  } else {
    // Centre the box on the coordinate origin.
    origin = {-0.5 * h * static_cast<double>(d[0]), -0.5 * h * static_cast<double>(d[1]),
              -0.5 * h * static_cast<double>(d[2])};
  }
  try {
    return GridSpec(d, origin, h);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

IngredientConfig parse_ingredient(const Section& s, const GridSpec& grid) {
  IngredientConfig c;
  c.section = s.name();
  const std::string type = s.raw("type");
  if (type == "migr") {
    c.kind = IngredientKind::migr;
    c.m = s.number("m");
  } else if (type == "deterministic") {
    c.kind = IngredientKind::deterministic;
    if (s.has("m")) throw ConfigError("key '" + s.name() + ".m' only applies to type = migr");
  } else {
    throw ConfigError("key '" + s.name() + ".type' must be migr or deterministic, got '" + type + "'");
  }
  c.shape.shape = s.raw("shape");
  if (c.shape.shape == "gaussian-bump") {
    c.shape.center = s.vec3("center");
    c.shape.amplitude = s.number("amplitude");
    c.shape.width = s.number("width");
    c.shape.cutoff = s.number("cutoff", 4.0);
    if (!(c.shape.width > 0.0)) throw ConfigError("key '" + s.name() + ".width' must be positive");
  } else if (c.shape.shape == "ball-indicator") {
    c.shape.center = s.vec3("center");
    c.shape.amplitude = s.number("amplitude");
    c.shape.radius = s.number("radius");
    if (!(c.shape.radius > 0.0)) throw ConfigError("key '" + s.name() + ".radius' must be positive");
  } else if (c.shape.shape == "rsgf") {
    c.shape.file = s.raw("file");
  } else {
    throw ConfigError("key '" + s.name() + ".shape' must be gaussian-bump, ball-indicator or rsgf");
  }
  c.mean_amplitude = s.number("mean_amplitude", 0.0);
  if (c.mean_amplitude != 0.0 && c.kind != IngredientKind::migr) {
    throw ConfigError("key '" + s.name() + ".mean_amplitude' only applies to type = migr");
  }
  c.collar = s.unsigned_integer("collar", 4);

  const ScalarField f = c.shape_field(grid);
  if (!vanishes_on_collar(f, c.collar)) {
    const std::string key = c.shape.shape == "gaussian-bump"    ? "width"
                            : c.shape.shape == "ball-indicator" ? "radius"
                                                                : "file";
    throw ConfigError("key '" + s.name() + "." + key + "': support reaches the " + std::to_string(c.collar) +
                      "-cell boundary collar");
  }
  if (c.kind == IngredientKind::migr) {
    if (c.shape.amplitude < 0.0) throw ConfigError("key '" + s.name() + ".amplitude' must be >= 0 for a migr strength");
    try {
      std::get<MigrSpec>(c.build(grid)).validate();
    } catch (const ConfigError& e) {
      throw ConfigError("[" + s.name() + "] " + e.what());
    }
  }
  return c;
}

}  // namespace

ScalarField IngredientConfig::shape_field(const GridSpec& grid) const {
  if (shape.shape == "gaussian-bump") return gaussian_bump(grid, shape.center, shape.amplitude, shape.width, shape.cutoff);
  if (shape.shape == "ball-indicator") return ball_indicator(grid, shape.center, shape.radius, shape.amplitude);
  ScalarField f = read_scalar_field(shape.file);
  if (!(f.grid() == grid)) throw ConfigError("key '" + section + ".file': field grid does not match [grid]");
  return f;
}

Ingredient IngredientConfig::build(const GridSpec& grid) const {
  ScalarField f = shape_field(grid);
  if (kind == IngredientKind::deterministic) return f;
  ScalarField mean(grid);
  if (mean_amplitude != 0.0) {
    const double scale = shape.amplitude != 0.0 ? mean_amplitude / shape.amplitude : 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) mean[i] = f[i] * scale;
  }
  return MigrSpec(m, std::move(f), std::move(mean), collar);
}

std::vector<double> BandConfig::frequencies() const {
  std::vector<double> out(n_freq);
  for (std::size_t j = 0; j < n_freq; ++j) out[j] = K + static_cast<double>(j) * delta;
  return out;
}

std::vector<Vec3> DirectionsConfig::resolve() const {
  if (distribution == "fibonacci-sphere") return fibonacci_sphere(count);
  return list;
}

SweepTemplate ExperimentConfig::sweep_template() const {
  SweepTemplate t{grid, std::nullopt, std::nullopt, solver.max_born_order, solver.tol, 4};
  if (source) t.source = source->build(grid);
  if (potential) t.potential = potential->build(grid);
  if (source) t.collar_cells = source->collar;
  if (potential) t.collar_cells = std::min(t.collar_cells, potential->collar);
  return t;
}

std::optional<Vec3> ExperimentConfig::normal() const {
  if (!source || !potential) return std::nullopt;
  return separating_normal(source->shape_field(grid), potential->shape_field(grid));
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config: " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto& [name, sec] : tree) {
    const auto it = allowed_keys().find(name);
    if (it == allowed_keys().end()) {
      if (sec.empty()) throw ConfigError("key '" + name + "' appears outside any section");
      throw ConfigError("unknown section [" + name + "]");
    }
    for (const auto& [key, value] : sec) {
      if (!it->second.count(key)) throw ConfigError("unknown key '" + name + "." + key + "'");
    }
  }
  auto section = [&](const std::string& name) {
    const auto child = tree.get_child_optional(name);
    return Section(name, child ? &*child : nullptr);
  };
  auto require = [&](const std::string& name) {
    if (!tree.get_child_optional(name)) throw ConfigError("missing section [" + name + "]");
    return section(name);
  };

  const GridSpec grid = parse_grid(require("grid"));
  ExperimentConfig cfg(grid);
  cfg.hash = fnv1a_hex(text);

  const Section exp = require("experiment");
  cfg.mode = acquisition_from_string(exp.text("mode", "passive"));
  cfg.seed = exp.unsigned_integer("seed");
  cfg.output = exp.text("output", "out");

  if (tree.get_child_optional("source")) cfg.source = parse_ingredient(section("source"), grid);
  if (tree.get_child_optional("potential")) cfg.potential = parse_ingredient(section("potential"), grid);
  if (cfg.mode == Acquisition::passive && !cfg.source) {
    throw ConfigError("missing section [source] (required for experiment.mode = passive)");
  }
  if (cfg.mode == Acquisition::active_backscatter && !cfg.potential) {
    throw ConfigError("missing section [potential] (required for experiment.mode = active-backscatter)");
  }
  if (cfg.source && cfg.potential && !cfg.normal()) {
    throw ConfigError(
        "[source] and [potential]: support boxes must be disjoint with a positive gap (separation "
        "requirement: positive distance between the convex hulls of supp f and supp q)");
  }

  const Section solver = section("solver");
  cfg.solver.tol = solver.number("tol", 1e-10);
  cfg.solver.max_born_order = static_cast<int>(solver.unsigned_integer("max_born_order", 20));
  if (!(cfg.solver.tol > 0.0)) throw ConfigError("key 'solver.tol' must be positive");
  if (cfg.solver.max_born_order < 1) throw ConfigError("key 'solver.max_born_order' must be >= 1");

  const Section band = require("band");
  cfg.band.K = band.number("K");
  cfg.band.delta = band.number("delta");
  cfg.band.n_freq = band.unsigned_integer("n_freq");
  cfg.band.taus = band.numbers("tau_list");
  if (!(cfg.band.K > 0.0)) throw ConfigError("key 'band.K' must be positive");
  if (!(cfg.band.delta > 0.0)) throw ConfigError("key 'band.delta' must be positive");
  const double terms = cfg.band.K / cfg.band.delta;
  if (std::abs(terms - std::round(terms)) > 1e-6 || std::round(terms) < 16.0) {
    throw ConfigError("key 'band.K' must be a multiple of band.delta with at least 16 mesh points in [K, 2K)");
  }
  if (cfg.band.taus.empty()) throw ConfigError("key 'band.tau_list' is empty");
  const bool active = cfg.mode == Acquisition::active_backscatter;
  const double tau_step = active ? 2.0 * cfg.band.delta : cfg.band.delta;
  double max_shift = 0.0;
  for (std::size_t i = 0; i < cfg.band.taus.size(); ++i) {
    const double tau = cfg.band.taus[i];
    const double t = tau / tau_step;
    if (tau < 0.0 || std::abs(t - std::round(t)) > 1e-6) {
      throw ConfigError("key 'band.tau_list[" + std::to_string(i) + "]' = " + format_double(tau) +
                        " is not a non-negative multiple of " + (active ? "2*" : "") + "band.delta");
    }
    max_shift = std::max(max_shift, active ? tau / 2.0 : tau);
  }
  const double needed = std::round((cfg.band.K + max_shift) / cfg.band.delta) + 1.0;
  if (static_cast<double>(cfg.band.n_freq) < needed) {
    throw ConfigError("key 'band.n_freq' = " + std::to_string(cfg.band.n_freq) + " does not cover [K, 2K + max shift]; need " +
                      format_double(needed));
  }

  const Section dirs = require("directions");
  cfg.directions.distribution = dirs.text("distribution", "fibonacci-sphere");
  if (cfg.directions.distribution == "fibonacci-sphere") {
    cfg.directions.count = dirs.unsigned_integer("count");
    if (cfg.directions.count == 0) throw ConfigError("key 'directions.count' must be positive");
  } else if (cfg.directions.distribution == "explicit") {
    cfg.directions.list = dirs.vec3_list("list");
    for (std::size_t i = 0; i < cfg.directions.list.size(); ++i) {
      if (!is_unit(cfg.directions.list[i])) {
        throw ConfigError("key 'directions.list[" + std::to_string(i) + "]' is not a unit vector");
      }
    }
    cfg.directions.count = cfg.directions.list.size();
    if (dirs.has("count") && dirs.unsigned_integer("count") != cfg.directions.count) {
      throw ConfigError("key 'directions.count' does not match the length of directions.list");
    }
    if (cfg.directions.list.empty()) throw ConfigError("key 'directions.list' is empty");
  } else {
    throw ConfigError("key 'directions.distribution' must be fibonacci-sphere or explicit");
  }

  if (tree.get_child_optional("nearfield")) {
    const Section nf = section("nearfield");
    NearfieldConfig n;
    n.points = nf.vec3_list("points");
    n.K = nf.number("K");
    n.n_freq = nf.unsigned_integer("n_freq");
    if (!(n.K > 1.0)) throw ConfigError("key 'nearfield.K' must exceed 1");
    if (n.n_freq < 2) throw ConfigError("key 'nearfield.n_freq' must be at least 2");
    if (n.points.empty()) throw ConfigError("key 'nearfield.points' is empty");
    cfg.nearfield = n;
  }
  if (tree.get_child_optional("diagnostic")) {
    const Section dg = section("diagnostic");
    DiagnosticConfig d;
    d.bands = dg.numbers("bands");
    d.tau = dg.number("tau", 0.0);
    d.dir_index = dg.unsigned_integer("dir_index", 0);
    if (d.bands.size() < 3) throw ConfigError("key 'diagnostic.bands' needs at least 3 band starts");
    if (d.dir_index >= cfg.directions.count) throw ConfigError("key 'diagnostic.dir_index' is out of range");
    cfg.diagnostic = d;
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace rscat
