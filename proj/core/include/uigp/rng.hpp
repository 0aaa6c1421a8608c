#pragma once

#include <cstdint>
#include <random>

namespace uigp {

/// splitmix64 step; decent avalanche, used only for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE1E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Deterministically derives the seed of a named substream from a master
/// seed, so parallel chains and pipeline stages never share an RNG stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
  return splitmix64(s);
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t stream) {
  return std::mt19937_64(derive_seed(master, stream));
}

}  // namespace uigp
