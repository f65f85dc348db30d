#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace wate {

/** Seeded RNG with portable draw functions.
 *
 * The engine is std::mt19937_64, but the bounded-integer and uniform-double
 * draws are implemented here instead of going through std::*_distribution:
 * the standard distributions are implementation-defined, and reproducibility
 * of seeded runs across standard libraries is part of this library's output
 * contract.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /** Uniform integer in [0, bound), bound >= 1. Unbiased via rejection. */
  std::uint64_t bounded(std::uint64_t bound) {
    // Reject draws from the tail that would bias the modulus.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % bound;
  }

  /** Uniform double in [0,1) with 53 random bits. */
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /** Bernoulli draw with success probability p. */
  int bernoulli(double p) { return uniform() < p ? 1 : 0; }

  /** Fisher-Yates shuffle of indices 0..n-1, returned as a vector. */
  template <typename Index = std::size_t>
  std::vector<Index> permutation(std::size_t n) {
    std::vector<Index> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<Index>(i);
    for (std::size_t i = n; i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(idx[i - 1], idx[j]);
    }
    return idx;
  }

 private:
  std::mt19937_64 engine_;
};

/** SplitMix64 mix step; used to derive independent streams from a master
 * seed (replication r uses mix_seed(master, r)). */
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace wate
