#ifndef WICKLAB_RNG_HPP
#define WICKLAB_RNG_HPP

#include <cstdint>

// Counter-based generator.
//
// Every random word is a pure function of (seed, stream, counter):
//
//   key  = mix(seed)
//   base = mix(key ^ (stream * 0xD1B54A32D192ED03))
//   word = mix(base + (counter + 1) * 0x9E3779B97F4A7C15)
//
// where mix is the SplitMix64 finalizer. Stream-split rule: Monte Carlo
// sample i uses stream i, and word j of that stream supplies the signs
// eps_{64j+1} .. eps_{64j+64} (bit b set means eps = -1). Nothing depends on
// thread scheduling, so estimates are bit-identical across machines and
// worker counts.

namespace wicklab::rng {

constexpr std::uint64_t mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t word(std::uint64_t seed, std::uint64_t stream,
                             std::uint64_t counter) noexcept {
  const std::uint64_t key = mix(seed);
  const std::uint64_t base = mix(key ^ (stream * 0xD1B54A32D192ED03ULL));
  return mix(base + (counter + 1) * 0x9E3779B97F4A7C15ULL);
}

/// Uniform double in [0, 1) with 53 random bits.
constexpr double uniform(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t counter) noexcept {
  return static_cast<double>(word(seed, stream, counter) >> 11) * 0x1.0p-53;
}

/// Small sequential convenience wrapper over one stream.
class Stream {
 public:
  constexpr Stream(std::uint64_t seed, std::uint64_t stream) noexcept
      : seed_(seed), stream_(stream) {}

  constexpr std::uint64_t next_word() noexcept {
    return word(seed_, stream_, counter_++);
  }
  constexpr double next_uniform() noexcept {
    return uniform(seed_, stream_, counter_++);
  }
  /// Uniform double in [lo, hi).
  constexpr double next_uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * next_uniform();
  }
  /// Uniform integer in [lo, hi].
  constexpr std::uint64_t next_int(std::uint64_t lo, std::uint64_t hi) noexcept {
    return lo + next_word() % (hi - lo + 1);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace wicklab::rng

#endif  // WICKLAB_RNG_HPP
