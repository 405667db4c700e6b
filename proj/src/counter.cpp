#include "pgl/counter.hpp"

#include <algorithm>
#include <new>
#include <ostream>
#include <string>

#include "pgl/errors.hpp"
#include "pgl/parallel.hpp"

namespace pgl {

WindowHistogram::WindowHistogram(unsigned k, std::vector<std::uint32_t> dense) : k_(k), dense_(std::move(dense)) {
  distinct_ = static_cast<std::uint64_t>(std::count_if(dense_.begin(), dense_.end(), [](auto c) { return c != 0; }));
}

WindowHistogram::WindowHistogram(unsigned k, std::unordered_map<std::uint64_t, std::uint64_t> sparse)
    : k_(k), sparse_(std::move(sparse)) {
  std::erase_if(sparse_, [](const auto& kv) { return kv.second == 0; });
  distinct_ = sparse_.size();
}

std::uint64_t WindowHistogram::count(std::uint64_t code) const {
  if (is_dense()) return code < dense_.size() ? dense_[code] : 0;
  const auto it = sparse_.find(code);
  return it == sparse_.end() ? 0 : it->second;
}

std::uint64_t WindowHistogram::total() const {
  std::uint64_t s = 0;
  for (auto c : dense_) s += c;
  for (const auto& [code, c] : sparse_) s += c;
  return s;
}

std::map<std::uint64_t, std::uint64_t> WindowHistogram::multiplicity_tally() const {
  std::map<std::uint64_t, std::uint64_t> tally;
  if (is_dense()) {
    // Small multiplicities dominate; tally them in an array first.
    std::vector<std::uint64_t> small(64, 0);
    for (auto c : dense_) {
      if (c == 0) continue;
      if (c < small.size()) {
        ++small[c];
      } else {
        ++tally[c];
      }
    }
    for (std::size_t m = 1; m < small.size(); ++m) {
      if (small[m]) tally[m] += small[m];
    }
  } else {
    for (const auto& [code, c] : sparse_) ++tally[c];
  }
  return tally;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> WindowHistogram::nonzero() const {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  out.reserve(distinct_);
  if (is_dense()) {
    for (std::size_t code = 0; code < dense_.size(); ++code) {
      if (dense_[code]) out.emplace_back(code, dense_[code]);
    }
  } else {
    out.assign(sparse_.begin(), sparse_.end());
    std::sort(out.begin(), out.end());
  }
  return out;
}

namespace {

constexpr std::uint64_t kWindowsPerBlock = std::uint64_t{1} << 16;
// Below this k each thread keeps a private counter array; above it, shared atomics.
constexpr unsigned kPrivateCountersCap = 16;

void check_preconditions(const PackedSequence& x, unsigned k) {
  if (k == 0 || k > kMaxWordLength) throw DomainError("k must lie in [1, 60]");
  const std::uint64_t need = (std::uint64_t{1} << k) + k - 1;
  if (x.length() < need) {
    throw DomainError("sequence of length " + std::to_string(x.length()) + " is shorter than 2^k + k - 1 = " +
                      std::to_string(need));
  }
}

template <class Visit>
void roll_windows(const PackedSequence& x, unsigned k, std::uint64_t first, std::uint64_t last, Visit&& visit) {
  std::uint64_t code = x.window(first, k);
  visit(code);
  const unsigned top = k - 1;
  for (std::uint64_t j = first + 1; j <= last; ++j) {
    code = (code >> 1) | (std::uint64_t{x.bit(j + top)} << top);
    visit(code);
  }
}

std::vector<std::uint32_t> dense_counts(const PackedSequence& x, unsigned k) {
  const std::uint64_t n = std::uint64_t{1} << k;
  const std::size_t nblocks = static_cast<std::size_t>((n + kWindowsPerBlock - 1) / kWindowsPerBlock);
  std::vector<std::uint32_t> counts(n, 0);
  auto block_range = [n](std::size_t b) {
    const std::uint64_t first = std::uint64_t{b} * kWindowsPerBlock + 1;
    return std::pair{first, std::min(n, first + kWindowsPerBlock - 1)};
  };

  const int threads = parallel::in_parallel() ? 1 : parallel::max_threads();
  if (threads == 1 || nblocks == 1) {
    roll_windows(x, k, 1, n, [&](std::uint64_t c) { ++counts[c]; });
    return counts;
  }

  if (k <= kPrivateCountersCap) {
    std::vector<std::vector<std::uint32_t>> local(static_cast<std::size_t>(threads));
#ifdef _OPENMP
#pragma omp parallel num_threads(threads)
#endif
    {
#ifdef _OPENMP
      auto& mine = local[static_cast<std::size_t>(omp_get_thread_num())];
#else
      auto& mine = local[0];
#endif
      mine.assign(n, 0);
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
      for (std::int64_t b = 0; b < static_cast<std::int64_t>(nblocks); ++b) {
        const auto [first, last] = block_range(static_cast<std::size_t>(b));
        roll_windows(x, k, first, last, [&](std::uint64_t c) { ++mine[c]; });
      }
    }
    for (const auto& mine : local) {
      if (mine.empty()) continue;
      for (std::uint64_t c = 0; c < n; ++c) counts[c] += mine[c];
    }
    return counts;
  }

  std::uint32_t* data = counts.data();
  parallel::for_blocks(nblocks, [&](std::size_t b) {
    const auto [first, last] = block_range(b);
    roll_windows(x, k, first, last, [data](std::uint64_t c) {
#ifdef _OPENMP
#pragma omp atomic update
#endif
      ++data[c];
    });
  });
  return counts;
}

}  // namespace

WindowHistogram window_histogram(const PackedSequence& x, unsigned k, const HistogramPolicy& policy) {
  check_preconditions(x, k);
  const std::uint64_t n = std::uint64_t{1} << k;
  const bool dense = k <= policy.dense_cap && k <= 32;
  // Sparse estimate: about (1 - 1/e) * 2^k distinct words, ~48 bytes per hash node.
  const double footprint = dense ? 4.0 * static_cast<double>(n) : 0.64 * 48.0 * static_cast<double>(n);
  if (footprint > static_cast<double>(policy.memory_budget)) {
    throw ResourceError("histogram at k=" + std::to_string(k) + " needs about " +
                        std::to_string(static_cast<std::uint64_t>(footprint) >> 20) +
                        " MiB, over the memory budget; lower k or raise HistogramPolicy::memory_budget");
  }
  try {
    if (dense) return WindowHistogram(k, dense_counts(x, k));
    std::unordered_map<std::uint64_t, std::uint64_t> sparse;
    sparse.reserve(static_cast<std::size_t>(0.64 * static_cast<double>(n)) + 1);
    roll_windows(x, k, 1, n, [&](std::uint64_t c) { ++sparse[c]; });
    return WindowHistogram(k, std::move(sparse));
  } catch (const std::bad_alloc&) {
    throw ResourceError("cannot allocate the histogram at k=" + std::to_string(k));
  }
}

std::uint64_t count_word(const PackedSequence& x, const Word& w) {
  check_preconditions(x, w.k);
  const std::uint64_t n = std::uint64_t{1} << w.k;
  const std::size_t nblocks = static_cast<std::size_t>((n + kWindowsPerBlock - 1) / kWindowsPerBlock);
  return parallel::ordered_sum<std::uint64_t>(nblocks, [&](std::size_t b) {
    const std::uint64_t first = std::uint64_t{b} * kWindowsPerBlock + 1;
    const std::uint64_t last = std::min(n, first + kWindowsPerBlock - 1);
    std::uint64_t hits = 0;
    roll_windows(x, w.k, first, last, [&](std::uint64_t c) { hits += (c == w.bits); });
    return hits;
  });
}

CountDistribution quenched_distribution(const WindowHistogram& h) {
  CountDistribution d;
  d.label = "quenched";
  const double scale = 1.0 / static_cast<double>(h.windows());
  const std::uint64_t absent = h.windows() - h.distinct();
  if (absent) d.pmf[0] = static_cast<double>(absent) * scale;
  for (const auto& [m, words] : h.multiplicity_tally()) d.pmf[m] = static_cast<double>(words) * scale;
  return d;
}

void write_histogram_csv(std::ostream& out, const WindowHistogram& h) {
  out << "word_code,count\n";
  for (const auto& [code, c] : h.nonzero()) out << code << ',' << c << '\n';
}

}  // namespace pgl
