#pragma once

#include <cstdint>
#include <random>

namespace nscond {

using Seed = std::uint64_t;
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent generator for (seed, stream, substream). Streams do not depend
// on the order in which they are created, so replicate i draws the same
// numbers whether it runs first, last, or on another thread.
inline Rng make_rng(Seed seed, std::uint64_t stream = 0, std::uint64_t substream = 0) {
  const std::uint64_t k0 = splitmix64(seed);
  const std::uint64_t k1 = splitmix64(k0 ^ splitmix64(stream + 0x1234567ULL));
  const std::uint64_t k2 = splitmix64(k1 ^ splitmix64(substream + 0x89ABCDEULL));
  std::seed_seq seq{static_cast<std::uint32_t>(k1), static_cast<std::uint32_t>(k1 >> 32),
                    static_cast<std::uint32_t>(k2), static_cast<std::uint32_t>(k2 >> 32)};
  return Rng(seq);
}

}  // namespace nscond
