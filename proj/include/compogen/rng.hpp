#pragma once

#include <cstdint>
#include <initializer_list>

namespace compogen {

// SplitMix64 finaliser. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Child stream key for `index` under `parent`. Streams are addressed by the
// path of indices from a root seed, never by the order in which they are used.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
  return mix64(mix64(parent) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t root,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t s = root;
  for (auto i : path) s = derive_seed(s, i);
  return s;
}

// xoshiro256** seeded through SplitMix64. All distributions are implemented
// here rather than with <random> distributions so that streams are identical
// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept;

  std::uint64_t next_u64() noexcept;
  // Uniform in [0, 1) with 53 bits of precision.
  double uniform01() noexcept;
  double uniform(double lo, double hi) noexcept;
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;
  double normal() noexcept;
  bool bernoulli(double p) noexcept;

 private:
  std::uint64_t s_[4];
};

}  // namespace compogen
