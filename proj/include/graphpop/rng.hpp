#pragma once

#include <cstdint>
#include <random>

namespace graphpop {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// Seed of world location `k`. Injective in `k` for a fixed world seed, and
/// independent of which worker handles the location.
constexpr std::uint64_t seed_for_location(std::uint64_t world_seed,
                                          std::uint64_t k) noexcept {
  return mix64(mix64(world_seed) ^ k);
}

/// Child stream `index` of a parent seed (e.g. one per model at a location).
constexpr std::uint64_t substream_seed(std::uint64_t parent,
                                       std::uint64_t index) noexcept {
  return mix64(parent ^ mix64(index + 0x9e3779b97f4a7c15ULL));
}

}  // namespace graphpop
