#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace collage {

// All randomness flows through this engine. mt19937_64's output sequence is
// fixed by the standard, so seeded runs agree across standard libraries.
using RandomStream = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream for item `index` of a run seeded with `seed`.
inline RandomStream derive_stream(std::uint64_t seed, std::uint64_t index) {
  return RandomStream(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x5851f42d4c957f2dULL)));
}

// Uniform integer in [0, n) from exactly one engine draw (multiply-shift).
// n must be > 0.
inline std::size_t uniform_index(RandomStream& rng, std::size_t n) {
  const unsigned __int128 product = static_cast<unsigned __int128>(rng()) * n;
  return static_cast<std::size_t>(product >> 64);
}

// Uniform double in [0, 1) from exactly one engine draw.
inline double uniform_unit(RandomStream& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace collage
