#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace ilg {

// SplitMix64 step, used for seed derivation only.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Mixes a seed with an arbitrary list of salts into a fresh 64-bit seed.
// Streams derived with distinct salt tuples are independent for all
// practical purposes, which is how per-sample / per-epoch generators are
// made without sharing mutable state across threads.
inline std::uint64_t derive_seed(std::uint64_t seed) {
  std::uint64_t s = seed;
  return splitmix64(s);
}

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt, Rest... rest) {
  std::uint64_t s = seed + 0x632be59bd9b4e019ull * (salt + 1);
  return derive_seed(splitmix64(s), rest...);
}

// Deterministic random generator.
//
// std::mt19937_64 is bit-exact by the standard; the distribution code here
// avoids std::uniform_real_distribution / std::normal_distribution, whose
// output is implementation-defined, so identical seeds give identical
// streams on every toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : base_(seed), engine_(derive_seed(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Multiply-high method; bias is O(2^-64).
  std::uint64_t uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Standard normal via Box-Muller (no cached second value, so the stream
  // position is a pure function of the number of calls).
  double gaussian() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  template <typename It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const std::uint64_t j = uniform_index(i);
      std::swap(first[i - 1], first[j]);
    }
  }

  std::vector<std::uint32_t> permutation(std::uint32_t n) {
    std::vector<std::uint32_t> p(n);
    for (std::uint32_t i = 0; i < n; ++i) p[i] = i;
    shuffle(p.begin(), p.end());
    return p;
  }

  // Independent child stream keyed by (construction seed, salt). Consumes
  // no state from this generator, so forking is order-insensitive.
  Rng fork(std::uint64_t salt) const { return Rng(derive_seed(base_, 0x666f726bull, salt)); }

 private:
  std::uint64_t base_;
  std::mt19937_64 engine_;
};

}  // namespace ilg
