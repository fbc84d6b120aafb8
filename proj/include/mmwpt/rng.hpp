#pragma once

#include <cstdint>
#include <random>

namespace mmwpt {

// Every random draw in the library goes through this engine type. Callers own
// one engine per worker; nothing is shared.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer, used to derive independent substream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Engine for substream `index` of a run seeded with `seed`:
/// seed_i = splitmix64(seed ^ splitmix64(index)).
inline Rng substream(std::uint64_t seed, std::uint64_t index) {
  return Rng(splitmix64(seed ^ splitmix64(index)));
}

}  // namespace mmwpt
