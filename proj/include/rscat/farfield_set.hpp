#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rscat/field.hpp"

namespace rscat {

enum class Acquisition { passive, active_backscatter };

std::string to_string(Acquisition a);
Acquisition acquisition_from_string(const std::string& s);

struct FarFieldEntry {
  Vec3 dir;
  double k = 0.0;
  Complex value;
};

struct FarFieldMeta {
  Acquisition kind = Acquisition::passive;
  double m = 0.0;  // rough order of the random ingredient the data is meant for
  std::uint64_t seed = 0;
  double band_lo = 0.0;
  double band_hi = 0.0;
  double delta = 0.0;  // frequency mesh spacing
  std::optional<Vec3> normal;
  std::string config_hash;
};

/// Single-realization far-field samples indexed by (direction, mesh frequency).
class FarFieldSet {
 public:
  FarFieldSet(FarFieldMeta meta, std::vector<FarFieldEntry> entries);

  const FarFieldMeta& meta() const noexcept { return meta_; }
  const std::vector<FarFieldEntry>& entries() const noexcept { return entries_; }
  const std::vector<Vec3>& directions() const noexcept { return dirs_; }
  std::size_t mesh_size() const noexcept { return mesh_size_; }

  /// Index of a direction present in the set (match within 1e-12).
  std::optional<std::size_t> find_direction(const Vec3& dir) const;

  /// Mesh index of k when it lies on the frequency mesh.
  std::optional<long> mesh_index(double k) const;
  double mesh_frequency(long index) const noexcept {
    return meta_.band_lo + static_cast<double>(index) * meta_.delta;
  }

  std::optional<Complex> value(std::size_t dir_index, long mesh_index) const;

 private:
  FarFieldMeta meta_;
  std::vector<FarFieldEntry> entries_;
  std::vector<Vec3> dirs_;
  std::size_t mesh_size_ = 0;
  std::vector<std::vector<std::optional<Complex>>> table_;  // [dir][mesh]
};

/// Writes <stem>.manifest (key=value) and <stem>.csv
/// ("dir_x,dir_y,dir_z,k,re,im", 17 significant digits).
void write_farfield(const std::filesystem::path& stem, const FarFieldSet& set);
FarFieldSet read_farfield(const std::filesystem::path& stem);

/// %.17g formatting used by every CSV the project emits.
std::string format_double(double v);

}  // namespace rscat
