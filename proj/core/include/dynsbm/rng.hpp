#pragma once

#include <cstdint>
#include <random>

namespace dynsbm {

using Rng = std::mt19937_64;

/// Derive an independent stream seed from a base seed and a stream index
/// (splitmix64 finalizer). Used to give replicate runs, k-means restarts
/// and per-step baselines their own deterministic streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace dynsbm
