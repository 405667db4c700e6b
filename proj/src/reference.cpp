#include "pgl/reference.hpp"

#include <cmath>

#include "pgl/errors.hpp"

namespace pgl::reference {

PackedSequence sample_sequence(const BiasSchedule& schedule, std::uint64_t length, std::uint64_t seed) {
  if (length == 0) throw DomainError("sequence length must be >= 1");
  const CounterRng rng(seed);
  std::vector<std::uint64_t> words((length + 63) / 64, 0);
  for (std::uint64_t n = 1; n <= length; ++n) {
    if (bernoulli_bit(rng.at(n), schedule.gamma(n))) words[(n - 1) >> 6] |= std::uint64_t{1} << ((n - 1) & 63);
  }
  return PackedSequence(std::move(words), length, seed, schedule.label());
}

WindowHistogram window_histogram(const PackedSequence& x, unsigned k) {
  if (k == 0 || k > 26) throw DomainError("reference histogram supports k in [1, 26]");
  const std::uint64_t n = std::uint64_t{1} << k;
  if (x.length() < n + k - 1) throw DomainError("sequence shorter than 2^k + k - 1");
  std::vector<std::uint32_t> counts(n, 0);
  for (std::uint64_t j = 1; j <= n; ++j) ++counts[x.window(j, k)];
  return WindowHistogram(k, std::move(counts));
}

double mean_abs_p_minus_one(const BiasSchedule& schedule, std::uint64_t j, unsigned k) {
  const std::uint64_t n = std::uint64_t{1} << k;
  double sum = 0.0;
  for (std::uint64_t w = 0; w < n; ++w) {
    double p = 1.0;
    for (unsigned i = 0; i < k; ++i) p *= 1.0 + (((w >> i) & 1U) ? 2.0 : -2.0) * schedule.gamma(i + j);
    sum += std::abs(p - 1.0);
  }
  return sum / static_cast<double>(n);
}

double union_bound_hit_prob(const BiasSchedule& schedule, unsigned k, const Word& w) {
  const std::uint64_t n = std::uint64_t{1} << k;
  double sum = 0.0;
  for (std::uint64_t j = 1; j <= n; ++j) {
    double p = 1.0;
    for (unsigned i = 1; i <= k; ++i) p *= 1.0 + 2.0 * w.symbol(i) * schedule.gamma(i + j - 1);
    sum += p;
  }
  return sum / static_cast<double>(n);
}

}  // namespace pgl::reference
