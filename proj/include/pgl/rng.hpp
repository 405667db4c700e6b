#pragma once

#include <cstdint>

namespace pgl {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 output function (Steele, Lea and Flood). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Child seed for trial `index` of a sweep keyed by `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master + kGoldenGamma) ^ mix64(index * kGoldenGamma + 0x632BE59BD9B4E019ULL));
}

/// Counter-based generator: the value at counter n is a pure function of (seed, n).
///
/// This is the SplitMix64 sequence started at a scrambled key, addressed directly by
/// position rather than by advancing state, so disjoint counter ranges can be filled by
/// different threads and a stream can be extended without replaying its prefix.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) noexcept : key_(mix64(seed ^ 0xD1B54A32D192ED03ULL)) {}

  constexpr std::uint64_t at(std::uint64_t counter) const noexcept {
    return mix64(key_ + (counter + 1) * kGoldenGamma);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(at(counter) >> 11) * 0x1.0p-53;
  }

  /// Independent stream for sub-task `index`.
  constexpr CounterRng split(std::uint64_t index) const noexcept {
    return CounterRng(derive_seed(key_, index));
  }

  constexpr std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
};

}  // namespace pgl
