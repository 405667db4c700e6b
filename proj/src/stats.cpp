#include "pgl/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <set>

#include "pgl/errors.hpp"

namespace pgl {

double poisson_pmf(double lambda, std::uint64_t m) {
  if (!(lambda > 0.0)) throw DomainError("poisson_pmf: lambda must be > 0");
  const double md = static_cast<double>(m);
  return std::exp(-lambda + md * std::log(lambda) - std::lgamma(md + 1.0));
}

double poisson_tail(double lambda, std::uint64_t m) {
  double sum = 0.0;
  for (std::uint64_t t = m + 1;; ++t) {
    const double term = poisson_pmf(lambda, t);
    sum += term;
    if (static_cast<double>(t) > lambda && term <= 1e-18 * sum) break;
  }
  return sum;
}

std::uint64_t poisson_truncation_point(double lambda, double tail) {
  std::uint64_t m = static_cast<std::uint64_t>(lambda);
  while (poisson_tail(lambda, m) >= tail) ++m;
  return m;
}

CountDistribution poisson_distribution(double lambda) {
  CountDistribution d;
  d.label = "poisson(" + std::to_string(lambda) + ")";
  d.poisson_lambda = lambda;
  const auto top = poisson_truncation_point(lambda);
  for (std::uint64_t m = 0; m <= top; ++m) d.pmf[m] = poisson_pmf(lambda, m);
  return d;
}

namespace {

void check_normalized(const CountDistribution& d) {
  double total = 0.0;
  for (const auto& [m, p] : d.pmf) {
    if (!(p >= 0.0)) throw DomainError("distribution '" + d.label + "' has a negative or NaN mass");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw DomainError("distribution '" + d.label + "' is not normalized (mass " + std::to_string(total) + ")");
  }
}

}  // namespace

TvResult tv_distance(const CountDistribution& p, const CountDistribution& q) {
  check_normalized(p);
  check_normalized(q);
  std::uint64_t top = std::max(p.max_support(), q.max_support());
  for (const auto* d : {&p, &q}) {
    if (d->poisson_lambda) top = std::max(top, poisson_truncation_point(*d->poisson_lambda));
  }
  auto mass = [](const CountDistribution& d, std::uint64_t m) {
    return d.poisson_lambda ? poisson_pmf(*d.poisson_lambda, m) : d(m);
  };
  auto tail = [top](const CountDistribution& d) {
    return d.poisson_lambda ? poisson_tail(*d.poisson_lambda, top) : 0.0;
  };

  double l1 = 0.0;
  if (p.poisson_lambda || q.poisson_lambda) {
    for (std::uint64_t m = 0; m <= top; ++m) l1 += std::abs(mass(p, m) - mass(q, m));
  } else {
    std::set<std::uint64_t> support;
    for (const auto& [m, v] : p.pmf) support.insert(m);
    for (const auto& [m, v] : q.pmf) support.insert(m);
    for (auto m : support) l1 += std::abs(p(m) - q(m));
  }
  const double tp = tail(p), tq = tail(q);
  l1 += std::abs(tp - tq);

  TvResult r;
  r.distance = std::clamp(0.5 * l1, 0.0, 1.0);
  r.truncation_mass = std::max(tp, tq);
  r.truncation_point = top;
  return r;
}

AnnealedAggregate aggregate_annealed(std::span<const CountDistribution> quenched) {
  if (quenched.empty()) throw DomainError("aggregate_annealed: empty list");
  std::set<std::uint64_t> support;
  for (const auto& d : quenched) {
    for (const auto& [m, v] : d.pmf) support.insert(m);
  }
  AnnealedAggregate agg;
  agg.samples = quenched.size();
  agg.mean.label = "annealed-mc";
  const double n = static_cast<double>(quenched.size());
  for (auto m : support) {
    double sum = 0.0;
    for (const auto& d : quenched) sum += d(m);
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& d : quenched) ss += (d(m) - mean) * (d(m) - mean);
    agg.mean.pmf[m] = mean;
    agg.stderr[m] = quenched.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  }
  return agg;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

Interval wilson_interval(double p_hat, double n, double confidence) {
  if (!(n > 0.0)) throw DomainError("wilson_interval: n must be > 0");
  if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("confidence must lie in (0, 1)");
  p_hat = std::clamp(p_hat, 0.0, 1.0);
  const double z = normal_quantile(0.5 * (1.0 + confidence));
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p_hat + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)) / denom;
  // The endpoints are exactly 0 and 1 at the extremes; rounding would otherwise leave them just inside.
  const double lower = p_hat == 0.0 ? 0.0 : std::max(0.0, center - half);
  const double upper = p_hat == 1.0 ? 1.0 : std::min(1.0, center + half);
  return {lower, upper};
}

Interval binomial_ci(std::uint64_t successes, std::uint64_t trials, double confidence) {
  if (trials == 0 || successes > trials) throw DomainError("binomial_ci: need 0 <= successes <= trials, trials >= 1");
  return wilson_interval(static_cast<double>(successes) / static_cast<double>(trials), static_cast<double>(trials),
                         confidence);
}

}  // namespace pgl
