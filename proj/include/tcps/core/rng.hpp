#pragma once

#include <cstdint>
#include <random>

namespace tcps {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent child seeds from a
/// (parent seed, index) pair so that trial i sees the same stream no matter
/// how trials are scheduled.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Uniform draw in [0, 1) built from the top 53 bits. The engine output is
/// fixed by the standard, so this stays bit-identical across standard
/// libraries (unlike std::uniform_real_distribution).
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace tcps
