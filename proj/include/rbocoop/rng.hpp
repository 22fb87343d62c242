#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

namespace rbocoop {

/// SplitMix64 (Vigna). Used for seed derivation and for short-lived
/// per-(agent, step) reward substreams.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

 private:
  std::uint64_t state_;
};

/// Deterministic seed for a labelled substream of `base`.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                                    std::uint64_t c = 0) noexcept {
  SplitMix64 g(base);
  std::uint64_t h = g();
  for (std::uint64_t v : {a, b, c}) {
    SplitMix64 step(h ^ (v + 0x632be59bd9b4e019ULL));
    h = step();
  }
  return h;
}

// The conversions below are written out instead of using <random>
// distributions, whose output is implementation-defined; traces must be
// byte-identical across standard libraries.

/// Uniform double in [0, 1) with 53 random bits.
template <class Gen>
double uniform01(Gen& gen) {
  return static_cast<double>(static_cast<std::uint64_t>(gen()) >> 11) * 0x1.0p-53;
}

/// Uniform index in [0, n).
template <class Gen>
std::size_t uniform_index(Gen& gen, std::size_t n) {
  auto i = static_cast<std::size_t>(uniform01(gen) * static_cast<double>(n));
  return i < n ? i : n - 1;
}

}  // namespace rbocoop
