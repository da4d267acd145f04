#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hwretail {

/// Child seed for stream `index` of a master seed (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform,
/// unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard exponential variate, used for flat Dirichlet draws.
inline double exponential1(std::mt19937_64& rng) { return -std::log1p(-uniform01(rng)); }

}  // namespace hwretail
