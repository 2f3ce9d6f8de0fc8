#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ppw {

using Rng = std::mt19937_64;

/// Master seed for one stochastic computation.
struct Seed {
  std::uint64_t value = 0;

  friend bool operator==(const Seed&, const Seed&) = default;
};

/// SplitMix64 finaliser.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent child seed for stream `index` of `master`.
inline Seed derive(Seed master, std::uint64_t index) {
  return Seed{mix64(mix64(master.value) ^ mix64(index + 0x632be59bd9b4e019ULL))};
}

/// FNV-1a, used to derive seeds from canonical strings.
inline std::uint64_t hash_text(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline Rng make_rng(Seed s) { return Rng(s.value); }

/// SplitMix64 generator: free to seed, used for per-particle streams.
class SplitMix {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix(Seed s) : state_(s.value) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

}  // namespace ppw
