#include "rscat/rsgf.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace rscat {

namespace {

constexpr char kMagic[4] = {'R', 'S', 'G', 'F'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 1 + 3 * 4 + 3 * 8 + 8;

template <class T>
void put(std::vector<std::uint8_t>& out, T value) {
  if constexpr (std::endian::native == std::endian::big) {
    auto raw = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(value);
    out.insert(out.end(), raw.rbegin(), raw.rend());
  } else {
    auto raw = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(value);
    out.insert(out.end(), raw.begin(), raw.end());
  }
}

template <class T>
T take(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  std::array<std::uint8_t, sizeof(T)> raw{};
  std::memcpy(raw.data(), bytes.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::ranges::reverse(raw);
  pos += sizeof(T);
  return std::bit_cast<T>(raw);
}

void put_header(std::vector<std::uint8_t>& out, const GridSpec& g, std::uint8_t kind) {
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put<std::uint32_t>(out, kRsgfVersion);
  put<std::uint8_t>(out, kind);
  for (int a = 0; a < 3; ++a) put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dims()[a]));
  put<double>(out, g.origin().x);
  put<double>(out, g.origin().y);
  put<double>(out, g.origin().z);
  put<double>(out, g.spacing());
}

}  // namespace

std::vector<std::uint8_t> encode_field(const ScalarField& field) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 8 * field.size());
  put_header(out, field.grid(), 0);
  for (double v : field.values()) put<double>(out, v);
  return out;
}

std::vector<std::uint8_t> encode_field(const ComplexField& field) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 16 * field.size());
  put_header(out, field.grid(), 1);
  for (const Complex& v : field.values()) {
    put<double>(out, v.real());
    put<double>(out, v.imag());
  }
  return out;
}

AnyField decode_field(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) throw FormatError("RSGF: truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("RSGF: bad magic");
  std::size_t pos = 4;
  const auto version = take<std::uint32_t>(bytes, pos);
  if (version != kRsgfVersion) {
    throw FormatError("RSGF: unsupported version " + std::to_string(version));
  }
  const auto kind = take<std::uint8_t>(bytes, pos);
  if (kind > 1) throw FormatError("RSGF: unknown kind " + std::to_string(kind));
  Dims dims{};
  for (int a = 0; a < 3; ++a) dims[a] = take<std::uint32_t>(bytes, pos);
  Vec3 origin;
  origin.x = take<double>(bytes, pos);
  origin.y = take<double>(bytes, pos);
  origin.z = take<double>(bytes, pos);
  const double spacing = take<double>(bytes, pos);

  std::optional<GridSpec> grid;
  try {
    grid.emplace(dims, origin, spacing);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("RSGF: invalid grid: ") + e.what());
  }
  const std::size_t n = grid->size();
  const std::size_t per_value = kind == 0 ? 8 : 16;
  if (bytes.size() != kHeaderBytes + n * per_value) {
    throw FormatError(bytes.size() < kHeaderBytes + n * per_value ? "RSGF: truncated payload"
                                                                   : "RSGF: trailing bytes");
  }
  try {
    if (kind == 0) {
      std::vector<double> data(n);
      for (auto& v : data) v = take<double>(bytes, pos);
      return ScalarField(*grid, std::move(data));
    }
    std::vector<Complex> data(n);
    for (auto& v : data) {
      const double re = take<double>(bytes, pos);
      const double im = take<double>(bytes, pos);
      v = {re, im};
    }
    return ComplexField(*grid, std::move(data));
  } catch (const FormatError&) {
    throw;
  } catch (const ConfigError& e) {
    throw FormatError(std::string("RSGF: invalid payload: ") + e.what());
  }
}

namespace {

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

void write_field(const std::filesystem::path& path, const ScalarField& field) {
  write_bytes(path, encode_field(field));
}

void write_field(const std::filesystem::path& path, const ComplexField& field) {
  write_bytes(path, encode_field(field));
}

AnyField read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return decode_field(bytes);
}

ScalarField read_scalar_field(const std::filesystem::path& path) {
  auto any = read_field(path);
  if (auto* f = std::get_if<ScalarField>(&any)) return std::move(*f);
  throw FormatError("RSGF: expected a real field in " + path.string());
}

ComplexField read_complex_field(const std::filesystem::path& path) {
  auto any = read_field(path);
  if (auto* f = std::get_if<ComplexField>(&any)) return std::move(*f);
  throw FormatError("RSGF: expected a complex field in " + path.string());
}

}  // namespace rscat
