#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace bobw {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream for (seed, tags...).
inline Rng derive_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = mix_seed(seed);
  for (auto tag : tags) h = mix_seed(h ^ mix_seed(tag + 0x632be59bd9b4e019ULL));
  return Rng(h);
}

}  // namespace bobw
