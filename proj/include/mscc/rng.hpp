#pragma once

// Deterministic randomness. The generator is std::mt19937_64 (fully specified
// by the standard), and bounded draws use rejection sampling so that sequences
// do not depend on the standard library's distribution implementations.

#include <cstdint>
#include <random>

namespace mscc {

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of trial `index` in a run with base seed `base`.
inline std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index) { return splitmix64(splitmix64(base) + index); }

// Uniform integer in [0, bound).
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

}  // namespace mscc
