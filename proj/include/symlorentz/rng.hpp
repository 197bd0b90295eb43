#pragma once

#include <cstdint>

namespace symlorentz {

/// SplitMix64. State update: s += 0x9E3779B97F4A7C15. Output: the standard
/// xor-shift-multiply finalizer of the new state. Doubles take the top 53 bits.
/// The sequence is part of the file-format contract (seeded sampling must be
/// reproducible across ports), so do not swap it for std::mt19937.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  constexpr double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  constexpr double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

}  // namespace symlorentz
