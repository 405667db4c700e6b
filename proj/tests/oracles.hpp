#pragma once

// Brute-force oracles: textbook definitions evaluated by exhaustive enumeration, sharing
// no code with the library beyond BiasSchedule::gamma and PackedSequence::symbol.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "pgl/sampler.hpp"
#include "pgl/schedule.hpp"

namespace oracle {

/// N_x(w) for every w with N_x(w) >= 1, by comparing each window symbol by symbol.
inline std::map<std::uint64_t, std::uint64_t> substring_counts(const pgl::PackedSequence& x, unsigned k) {
  std::map<std::uint64_t, std::uint64_t> counts;
  const std::uint64_t n = std::uint64_t{1} << k;
  for (std::uint64_t j = 1; j <= n; ++j) {
    for (std::uint64_t w = 0; w < (std::uint64_t{1} << k); ++w) {
      bool match = true;
      for (unsigned i = 1; i <= k && match; ++i) {
        const int want = ((w >> (i - 1)) & 1U) ? 1 : -1;
        match = x.symbol(j + i - 1) == want;
      }
      if (match) ++counts[w];
    }
  }
  return counts;
}

/// nu{x_1..x_L = s} for the bit pattern s (bit n-1 is x_n).
inline double prefix_prob(const pgl::BiasSchedule& s, std::uint64_t bits, unsigned length) {
  double p = 1.0;
  for (unsigned n = 1; n <= length; ++n) {
    const double g = s.gamma(n);
    p *= ((bits >> (n - 1)) & 1U) ? 0.5 + g : 0.5 - g;
  }
  return p;
}

inline std::uint64_t window_of(std::uint64_t bits, std::uint64_t j, unsigned k) {
  return (bits >> (j - 1)) & ((std::uint64_t{1} << k) - 1);
}

/// E[I_i I_j] over every x-prefix of length max(i, j) + k - 1 and every word.
inline double pair_expectation(const pgl::BiasSchedule& s, std::uint64_t i, std::uint64_t j, unsigned k) {
  const unsigned length = static_cast<unsigned>(std::max(i, j)) + k - 1;
  double total = 0.0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << length); ++x) {
    const double px = prefix_prob(s, x, length);
    for (std::uint64_t w = 0; w < (std::uint64_t{1} << k); ++w) {
      if (window_of(x, i, k) == w && window_of(x, j, k) == w) total += px;
    }
  }
  return total / static_cast<double>(std::uint64_t{1} << k);
}

/// Exact law of M_k under nu x mu^k by direct enumeration.
inline std::map<std::uint64_t, double> annealed_pmf(const pgl::BiasSchedule& s, unsigned k) {
  const std::uint64_t n = std::uint64_t{1} << k;
  const unsigned length = static_cast<unsigned>(n) + k - 1;
  std::map<std::uint64_t, double> pmf;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << length); ++x) {
    const double px = prefix_prob(s, x, length);
    for (std::uint64_t w = 0; w < n; ++w) {
      std::uint64_t m = 0;
      for (std::uint64_t j = 1; j <= n; ++j) m += window_of(x, j, k) == w;
      pmf[m] += px / static_cast<double>(n);
    }
  }
  return pmf;
}

inline double p_jk(const pgl::BiasSchedule& s, std::uint64_t j, unsigned k, std::uint64_t w) {
  double p = 1.0;
  for (unsigned i = 1; i <= k; ++i) {
    const int wi = ((w >> (i - 1)) & 1U) ? 1 : -1;
    p *= 1.0 + 2.0 * wi * s.gamma(i + j - 1);
  }
  return p;
}

inline double mean_abs_p_minus_one(const pgl::BiasSchedule& s, std::uint64_t j, unsigned k) {
  double sum = 0.0;
  for (std::uint64_t w = 0; w < (std::uint64_t{1} << k); ++w) sum += std::abs(p_jk(s, j, k, w) - 1.0);
  return sum / static_cast<double>(std::uint64_t{1} << k);
}

/// Neighbourhood sizes |{i in [2^k] : i != j, |i - j| < k}|.
inline double a_term(unsigned k) {
  const std::int64_t n = std::int64_t{1} << k;
  double total = 0.0;
  for (std::int64_t j = 1; j <= n; ++j) {
    total += 1.0;
    for (std::int64_t i = 1; i <= n; ++i) total += (i != j && std::llabs(i - j) < k) ? 1.0 : 0.0;
  }
  return total / static_cast<double>(n) / static_cast<double>(n);
}

inline double b_term(const pgl::BiasSchedule& s, unsigned k) {
  const std::int64_t n = std::int64_t{1} << k;
  double total = 0.0;
  for (std::int64_t j = 1; j <= n; ++j) {
    for (std::int64_t i = 1; i <= n; ++i) {
      if (i != j && std::llabs(i - j) < k) total += pair_expectation(s, i, j, k);
    }
  }
  return total;
}

inline double c_term(const pgl::BiasSchedule& s, unsigned k) {
  const std::uint64_t n = std::uint64_t{1} << k;
  double total = 0.0;
  for (std::uint64_t j = 1; j <= n; ++j) total += mean_abs_p_minus_one(s, j, k);
  return total / static_cast<double>(n);
}

inline double poisson_pmf(double lambda, unsigned m) {
  double f = 1.0;
  for (unsigned i = 2; i <= m; ++i) f *= i;
  return std::exp(-lambda) * std::pow(lambda, m) / f;
}

inline double tv(const std::map<std::uint64_t, double>& p, double lambda) {
  double d = 0.0;
  double covered = 0.0;
  for (unsigned m = 0; m < 60; ++m) {
    const auto it = p.find(m);
    const double q = poisson_pmf(lambda, m);
    covered += q;
    d += std::abs((it == p.end() ? 0.0 : it->second) - q);
  }
  return 0.5 * (d + (1.0 - covered));
}

inline pgl::PackedSequence random_sequence(std::mt19937_64& rng, std::uint64_t length, double p_plus = 0.5) {
  std::bernoulli_distribution coin(p_plus);
  std::vector<int> s(length);
  for (auto& v : s) v = coin(rng) ? 1 : -1;
  return pgl::PackedSequence::from_symbols(s);
}

}  // namespace oracle
