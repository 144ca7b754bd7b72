#include "rscat/farfield_set.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace rscat {

std::string to_string(Acquisition a) {
  return a == Acquisition::passive ? "passive" : "active-backscatter";
}

Acquisition acquisition_from_string(const std::string& s) {
  if (s == "passive") return Acquisition::passive;
  if (s == "active-backscatter") return Acquisition::active_backscatter;
  throw ConfigError("unknown acquisition mode '" + s + "' (expected passive or active-backscatter)");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

FarFieldSet::FarFieldSet(FarFieldMeta meta, std::vector<FarFieldEntry> entries)
    : meta_(std::move(meta)), entries_(std::move(entries)) {
  if (!(meta_.delta > 0.0)) throw ConfigError("far-field set: delta must be positive");
  if (meta_.band_hi < meta_.band_lo) throw ConfigError("far-field set: band_hi below band_lo");
  const double span = (meta_.band_hi - meta_.band_lo) / meta_.delta;
  mesh_size_ = static_cast<std::size_t>(std::llround(span)) + 1;
  for (const auto& e : entries_) {
    if (!is_unit(e.dir)) throw ConfigError("far-field set: entry direction is not a unit vector");
    std::size_t di = 0;
    for (; di < dirs_.size(); ++di) {
      if (norm(dirs_[di] - e.dir) <= 1e-12) break;
    }
    if (di == dirs_.size()) {
      dirs_.push_back(e.dir);
      table_.emplace_back(mesh_size_);
    }
    const auto mi = mesh_index(e.k);
    if (!mi) throw ConfigError("far-field set: frequency " + format_double(e.k) + " is off the mesh");
    auto& slot = table_[di][static_cast<std::size_t>(*mi)];
    if (slot) throw ConfigError("far-field set: duplicate entry at k=" + format_double(e.k));
    slot = e.value;
  }
}

std::optional<std::size_t> FarFieldSet::find_direction(const Vec3& dir) const {
  for (std::size_t i = 0; i < dirs_.size(); ++i) {
    if (norm(dirs_[i] - dir) <= 1e-12) return i;
  }
  return std::nullopt;
}

std::optional<long> FarFieldSet::mesh_index(double k) const {
  const double t = (k - meta_.band_lo) / meta_.delta;
  const double r = std::round(t);
  if (std::abs(t - r) > 1e-6 || r < 0.0 || r >= static_cast<double>(mesh_size_)) return std::nullopt;
  return static_cast<long>(r);
}

std::optional<Complex> FarFieldSet::value(std::size_t dir_index, long mesh_index) const {
  if (dir_index >= table_.size() || mesh_index < 0 || mesh_index >= static_cast<long>(mesh_size_)) {
    return std::nullopt;
  }
  return table_[dir_index][static_cast<std::size_t>(mesh_index)];
}

namespace {

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* suffix) {
  return std::filesystem::path(stem.string() + suffix);
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw FormatError("far-field: cannot parse " + what + " '" + text + "'");
  }
}

}  // namespace

void write_farfield(const std::filesystem::path& stem, const FarFieldSet& set) {
  const auto& m = set.meta();
  std::ofstream man(with_suffix(stem, ".manifest"));
  if (!man) throw IoError("cannot write " + with_suffix(stem, ".manifest").string());
  man << "kind=" << to_string(m.kind) << '\n'
      << "m=" << format_double(m.m) << '\n'
      << "seed=" << m.seed << '\n'
      << "band_lo=" << format_double(m.band_lo) << '\n'
      << "band_hi=" << format_double(m.band_hi) << '\n'
      << "delta=" << format_double(m.delta) << '\n'
      << "dirs=" << set.directions().size() << '\n';
  if (m.normal) {
    man << "normal=" << format_double(m.normal->x) << ',' << format_double(m.normal->y) << ','
        << format_double(m.normal->z) << '\n';
  }
  if (!m.config_hash.empty()) man << "config_hash=" << m.config_hash << '\n';

  std::ofstream csv(with_suffix(stem, ".csv"));
  if (!csv) throw IoError("cannot write " + with_suffix(stem, ".csv").string());
  csv << "dir_x,dir_y,dir_z,k,re,im\n";
  for (const auto& e : set.entries()) {
    csv << format_double(e.dir.x) << ',' << format_double(e.dir.y) << ',' << format_double(e.dir.z) << ','
        << format_double(e.k) << ',' << format_double(e.value.real()) << ','
        << format_double(e.value.imag()) << '\n';
  }
  if (!man || !csv) throw IoError("write failed for far-field set " + stem.string());
}

FarFieldSet read_farfield(const std::filesystem::path& stem) {
  std::ifstream man(with_suffix(stem, ".manifest"));
  if (!man) throw IoError("cannot open " + with_suffix(stem, ".manifest").string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(man, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("far-field manifest: malformed line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto need = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw FormatError("far-field manifest: missing key '" + key + "'");
    return it->second;
  };
  FarFieldMeta meta;
  meta.kind = acquisition_from_string(need("kind"));
  meta.m = parse_number(need("m"), "m");
  try {
    meta.seed = std::stoull(need("seed"));
  } catch (const std::logic_error&) {
    throw FormatError("far-field manifest: bad seed");
  }
  meta.band_lo = parse_number(need("band_lo"), "band_lo");
  meta.band_hi = parse_number(need("band_hi"), "band_hi");
  meta.delta = parse_number(need("delta"), "delta");
  if (auto it = kv.find("normal"); it != kv.end()) {
    std::stringstream ss(it->second);
    std::string part;
    double c[3];
    for (double& v : c) {
      if (!std::getline(ss, part, ',')) throw FormatError("far-field manifest: bad normal");
      v = parse_number(part, "normal");
    }
    meta.normal = Vec3{c[0], c[1], c[2]};
  }
  if (auto it = kv.find("config_hash"); it != kv.end()) meta.config_hash = it->second;

  std::ifstream csv(with_suffix(stem, ".csv"));
  if (!csv) throw IoError("cannot open " + with_suffix(stem, ".csv").string());
  if (!std::getline(csv, line) || line != "dir_x,dir_y,dir_z,k,re,im") {
    throw FormatError("far-field CSV: unexpected header");
  }
  std::vector<FarFieldEntry> entries;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string part;
    double v[6];
    for (double& x : v) {
      if (!std::getline(ss, part, ',')) throw FormatError("far-field CSV: short row '" + line + "'");
      x = parse_number(part, "value");
    }
    entries.push_back({Vec3{v[0], v[1], v[2]}, v[3], Complex{v[4], v[5]}});
  }
  FarFieldSet set(std::move(meta), std::move(entries));
  if (set.directions().size() != static_cast<std::size_t>(parse_number(need("dirs"), "dirs"))) {
    throw FormatError("far-field: manifest direction count does not match CSV");
  }
  return set;
}

}  // namespace rscat
