#pragma once

#include <cstdint>

namespace rgrade {

// Counter-based 64-bit generator (SplitMix64 output function over an
// affine counter). Substream i of a master seed is independent of thread
// scheduling: stream state depends only on (seed, i, draw index).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  // Substream for replicate `i` under `seed`: the substream seed is one
  // mixing step applied to seed + (i+1)*gamma, so adjacent replicates are
  // decorrelated.
  static SplitMix64 substream(std::uint64_t seed, std::uint64_t i) {
    return SplitMix64(mix(seed + (i + 1) * kGamma));
  }

  std::uint64_t next() {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform draw in [0, n) via the 128-bit multiply trick.
  std::uint32_t next_below(std::uint32_t n) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  double next_double() {  // uniform in [0,1)
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace rgrade
