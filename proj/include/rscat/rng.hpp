#pragma once

#include <cstdint>
#include <random>

namespace rscat {

/// SplitMix64 finalizer; decorrelates nearby integer seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent generator for stream `stream` of seed `seed`.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream = 0) {
  return std::mt19937_64(mix64(mix64(seed) ^ (stream * 0xD1B54A32D192ED03ULL + 1)));
}

}  // namespace rscat
