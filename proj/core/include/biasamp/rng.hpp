#pragma once

#include <cstdint>
#include <vector>

namespace biasamp {

/// Deterministic random source used for every stochastic path in the
/// library. SplitMix64 core with explicit integer/real/normal draws, so
/// results are identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Unbiased integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; generates pairs, caches the spare.
  double next_normal();

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stable seed derivation: independent streams from a master seed.
/// derive_seed(s, k) != derive_seed(s, k') for k != k' with overwhelming
/// probability, and the mapping never changes between releases.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Fisher-Yates permutation of 0..n-1 driven by rng.
std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng);

}  // namespace biasamp
