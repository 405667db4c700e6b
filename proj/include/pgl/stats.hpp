#pragma once

#include <cstdint>
#include <map>
#include <span>

#include "pgl/distribution.hpp"

namespace pgl {

inline constexpr double kPoissonTailTolerance = 1e-12;

/// e^{-lambda} lambda^m / m!, evaluated through lgamma.
double poisson_pmf(double lambda, std::uint64_t m);

/// P(X > m) for X ~ Po(lambda), summed term by term (no cancellation).
double poisson_tail(double lambda, std::uint64_t m);

/// Smallest M with P(X > M) < tail.
std::uint64_t poisson_truncation_point(double lambda, double tail = kPoissonTailTolerance);

/// Po(lambda) stored on 0..M with M = poisson_truncation_point(lambda).
CountDistribution poisson_distribution(double lambda);

struct TvResult {
  double distance = 0.0;
  /// Poisson mass beyond the largest compared m.
  double truncation_mass = 0.0;
  std::uint64_t truncation_point = 0;
};

/// Half the L1 distance over the union support. Reference Poisson laws are evaluated in
/// closed form at every compared m and their residual tail is accounted for.
/// Throws DomainError when either input's mass differs from 1 by more than 1e-9.
TvResult tv_distance(const CountDistribution& p, const CountDistribution& q);

struct AnnealedAggregate {
  CountDistribution mean;
  /// Standard error of the mean per bin (sample standard deviation / sqrt(n)).
  std::map<std::uint64_t, double> stderr;
  std::size_t samples = 0;
};

/// Bin-wise average of quenched laws. Throws DomainError on an empty list.
AnnealedAggregate aggregate_annealed(std::span<const CountDistribution> quenched);

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
  bool contains(double v) const noexcept { return lower <= v && v <= upper; }
};

double normal_cdf(double z);
/// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);

/// Wilson score interval for an estimated proportion p_hat from n trials.
Interval wilson_interval(double p_hat, double n, double confidence);

/// Wilson score interval for successes / trials. Throws DomainError unless 0 <= successes <= trials, trials >= 1.
Interval binomial_ci(std::uint64_t successes, std::uint64_t trials, double confidence);

}  // namespace pgl
