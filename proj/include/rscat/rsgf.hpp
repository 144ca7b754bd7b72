#pragma once

// RSGF: little-endian binary container for grid fields.
//
//   magic   "RSGF"          4 bytes
//   version u32 = 1
//   kind    u8  (0 real, 1 complex)
//   dims    3 x u32
//   origin  3 x f64
//   spacing f64
//   payload f64 row-major; complex values interleaved (re, im)

#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

#include "rscat/field.hpp"

namespace rscat {

using AnyField = std::variant<ScalarField, ComplexField>;

inline constexpr std::uint32_t kRsgfVersion = 1;

std::vector<std::uint8_t> encode_field(const ScalarField& field);
std::vector<std::uint8_t> encode_field(const ComplexField& field);
AnyField decode_field(std::span<const std::uint8_t> bytes);

void write_field(const std::filesystem::path& path, const ScalarField& field);
void write_field(const std::filesystem::path& path, const ComplexField& field);
AnyField read_field(const std::filesystem::path& path);

ScalarField read_scalar_field(const std::filesystem::path& path);
ComplexField read_complex_field(const std::filesystem::path& path);

}  // namespace rscat
