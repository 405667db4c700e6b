#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pgl/rng.hpp"
#include "pgl/schedule.hpp"

namespace pgl {

inline constexpr unsigned kMaxWordLength = 60;

/// A word omega in {-1,+1}^k. Bit i-1 of `bits` is 1 iff omega_i = +1.
struct Word {
  unsigned k = 1;
  std::uint64_t bits = 0;

  /// omega_i for 1 <= i <= k.
  int symbol(unsigned i) const noexcept { return ((bits >> (i - 1)) & 1U) ? 1 : -1; }

  /// Number of +1 symbols.
  unsigned plus_count() const noexcept;
  /// sum_i omega_i.
  int symbol_sum() const noexcept { return 2 * static_cast<int>(plus_count()) - static_cast<int>(k); }

  static Word from_symbols(std::initializer_list<int> symbols);

  friend bool operator==(const Word&, const Word&) = default;
};

/// A finite prefix x_1..x_L of a point of {-1,+1}^N, packed 64 positions per word.
/// Position n (1-based) is bit (n-1) % 64 of word (n-1) / 64; bit 1 encodes x_n = +1.
class PackedSequence {
 public:
  PackedSequence() = default;
  PackedSequence(std::vector<std::uint64_t> words, std::uint64_t length, std::uint64_t seed,
                 std::string schedule_label);

  /// Builds a sequence from explicit symbols in {-1, +1}.
  static PackedSequence from_symbols(std::span<const int> symbols, std::string label = "explicit");

  std::uint64_t length() const noexcept { return length_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::string& schedule_label() const noexcept { return label_; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  bool bit(std::uint64_t n) const noexcept {
    const std::uint64_t p = n - 1;
    return (words_[p >> 6] >> (p & 63)) & 1U;
  }
  int symbol(std::uint64_t n) const noexcept { return bit(n) ? 1 : -1; }

  /// Code of x_j..x_{j+k-1} with x_j in the least significant bit. Requires j + k - 1 <= length.
  std::uint64_t window(std::uint64_t j, unsigned k) const noexcept {
    const std::uint64_t p = j - 1;
    const std::uint64_t q = p >> 6;
    const unsigned r = static_cast<unsigned>(p & 63);
    std::uint64_t v = words_[q] >> r;
    if (r != 0 && r + k > 64) v |= words_[q + 1] << (64 - r);
    return k == 64 ? v : v & ((std::uint64_t{1} << k) - 1);
  }

  friend bool operator==(const PackedSequence& a, const PackedSequence& b) {
    return a.length_ == b.length_ && a.words_ == b.words_;
  }

 private:
  std::vector<std::uint64_t> words_;
  std::uint64_t length_ = 0;
  std::uint64_t seed_ = 0;
  std::string label_;
};

/// Sequences longer than this many positions are refused with ResourceError.
inline constexpr std::uint64_t kMaxSequenceLength = std::uint64_t{1} << 36;

/// x_n independent with P(x_n = +1) = 1/2 + gamma(n). Bit n depends only on (seed, n).
PackedSequence sample_sequence(const BiasSchedule& schedule, std::uint64_t length, std::uint64_t seed);

/// Whether position n is +1, given a uniform draw u from the position's counter.
inline bool bernoulli_bit(std::uint64_t u, double gamma) noexcept {
  const double p = 0.5 + gamma;
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  const double t = p * 0x1.0p64;
  return t >= 0x1.0p64 ? true : u < static_cast<std::uint64_t>(t);
}

/// Uniform word on {-1,+1}^k from a single generator call. Throws DomainError unless 1 <= k <= 60.
Word sample_word(unsigned k, std::uint64_t seed);
/// Draw number `counter` of the word stream `rng`.
Word sample_word(unsigned k, const CounterRng& rng, std::uint64_t counter);

/// Raw dump: "PGL1", k as uint32 LE, L as uint64 LE, then ceil(L/8) bytes with
/// position n at bit (n-1) % 8 of byte (n-1) / 8.
void write_packed(std::ostream& out, const PackedSequence& x, unsigned k);

struct PackedDump {
  PackedSequence sequence;
  unsigned k = 0;
};
PackedDump read_packed(std::istream& in);

}  // namespace pgl
