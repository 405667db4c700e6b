#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <unordered_map>
#include <vector>

#include "pgl/distribution.hpp"
#include "pgl/sampler.hpp"

namespace pgl {

struct HistogramPolicy {
  /// Largest k stored as a dense array of 32-bit counters (2^26 entries = 256 MiB).
  unsigned dense_cap = 26;
  /// Upper limit on the estimated histogram footprint.
  std::uint64_t memory_budget = std::uint64_t{2} << 30;
};

/// Occurrence counts N_x(w) of each k-word over the window starts j = 1..2^k.
class WindowHistogram {
 public:
  WindowHistogram(unsigned k, std::vector<std::uint32_t> dense);
  WindowHistogram(unsigned k, std::unordered_map<std::uint64_t, std::uint64_t> sparse);

  unsigned k() const noexcept { return k_; }
  std::uint64_t windows() const noexcept { return std::uint64_t{1} << k_; }
  std::uint64_t distinct() const noexcept { return distinct_; }
  bool is_dense() const noexcept { return !dense_.empty(); }

  std::uint64_t count(std::uint64_t code) const;
  /// Sum of all counts; equals windows() for every histogram built from a sequence.
  std::uint64_t total() const;
  /// m -> number of words w with N_x(w) = m, for m >= 1.
  std::map<std::uint64_t, std::uint64_t> multiplicity_tally() const;
  /// (code, count) pairs with count >= 1, ordered by code.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> nonzero() const;

  friend bool operator==(const WindowHistogram& a, const WindowHistogram& b) {
    return a.k_ == b.k_ && a.nonzero() == b.nonzero();
  }

 private:
  unsigned k_;
  std::vector<std::uint32_t> dense_;
  std::unordered_map<std::uint64_t, std::uint64_t> sparse_;
  std::uint64_t distinct_ = 0;
};

/// One pass with a rolling k-bit window code; parallel over disjoint position ranges.
/// Throws DomainError if x is shorter than 2^k + k - 1 or k is outside [1, 60], and
/// ResourceError if the histogram would exceed the policy's memory budget.
WindowHistogram window_histogram(const PackedSequence& x, unsigned k, const HistogramPolicy& policy = {});

/// M_k(x, w) = #{1 <= j <= 2^k : x_j..x_{j+k-1} = w}.
std::uint64_t count_word(const PackedSequence& x, const Word& w);

/// Law of M_k^x under a uniform word: pmf(m) = #{w : N_x(w) = m} / 2^k.
CountDistribution quenched_distribution(const WindowHistogram& h);

/// CSV with header `word_code,count`, one row per word with a nonzero count.
void write_histogram_csv(std::ostream& out, const WindowHistogram& h);

}  // namespace pgl
