#pragma once

#include <cstdint>
#include <random>

namespace hetpart {

// mt19937_64's output sequence is fixed by the standard; the std
// distributions are not, so draws go through these helpers to keep seeded
// artifacts identical across standard libraries.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Inclusive bounds.
inline std::uint64_t uniform_int(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return lo + rng() % (hi - lo + 1);
}

// Value in [0.5 * mean, 1.5 * mean].
inline double around(Rng& rng, double mean) {
  return mean * uniform(rng, 0.5, 1.5);
}

}  // namespace hetpart
