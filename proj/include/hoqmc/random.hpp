#pragma once

// Counter-based deterministic streams.  Value i of stream `key` depends only on
// (key, i), so draws can be taken in any order or from any thread.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hoqmc::rng {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t bits(std::uint64_t key, std::uint64_t counter) {
  return splitmix64(splitmix64(key) ^ (counter * 0xD1B54A32D192ED03ULL));
}

/// Uniform double in [0,1) with 53 random bits.
inline double uniform(std::uint64_t key, std::uint64_t counter) {
  return static_cast<double>(bits(key, counter) >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on draws 2i and 2i+1.
inline double normal(std::uint64_t key, std::uint64_t i) {
  const double u1 = 1.0 - uniform(key, 2 * i);  // (0,1]
  const double u2 = uniform(key, 2 * i + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace hoqmc::rng
