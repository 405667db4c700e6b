#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace pgl {

/// A probability mass function on the nonnegative integers, stored sparsely.
struct CountDistribution {
  std::map<std::uint64_t, double> pmf;
  /// quenched(seed=...), annealed-mc, exact-annealed, poisson(lambda)
  std::string label;
  /// Set for Poisson reference laws; lets consumers evaluate mass outside the stored support.
  std::optional<double> poisson_lambda;

  double operator()(std::uint64_t m) const {
    const auto it = pmf.find(m);
    return it == pmf.end() ? 0.0 : it->second;
  }
  double total_mass() const;
  double mean() const;
  std::uint64_t max_support() const { return pmf.empty() ? 0 : pmf.rbegin()->first; }
};

/// CSV with header `m,probability`, rows in increasing m.
void write_distribution_csv(std::ostream& out, const CountDistribution& d);

}  // namespace pgl
