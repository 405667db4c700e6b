#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pgl/counter.hpp"
#include "pgl/errors.hpp"
#include "pgl/stats.hpp"

using namespace pgl;

namespace {

CountDistribution point(std::uint64_t m) {
  CountDistribution d;
  d.pmf[m] = 1.0;
  return d;
}

CountDistribution random_law(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CountDistribution d;
  const int n = 1 + rng() % 8;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = u(rng);
    d.pmf[rng() % 12] += v;
    total += v;
  }
  for (auto& [m, v] : d.pmf) v /= total;
  return d;
}

}  // namespace

TEST_CASE("poisson pmf and tail") {
  CHECK(poisson_pmf(1.0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(poisson_pmf(1.0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(poisson_pmf(1.0, 3) == doctest::Approx(0.0613132).epsilon(1e-6));
  for (double lambda : {0.5, 1.0, 2.0, 7.5}) {
    for (unsigned m = 0; m < 30; ++m) {
      CHECK(poisson_pmf(lambda, m) == doctest::Approx(oracle::poisson_pmf(lambda, m)).epsilon(1e-12));
    }
    const auto d = poisson_distribution(lambda);
    CHECK(1.0 - d.total_mass() < 1e-12);
    CHECK(poisson_tail(lambda, d.max_support()) < kPoissonTailTolerance);
    CHECK(d.poisson_lambda == lambda);
    double below = 0.0;
    for (unsigned m = 0; m <= 5; ++m) below += poisson_pmf(lambda, m);
    CHECK(poisson_tail(lambda, 5) == doctest::Approx(1.0 - below).epsilon(1e-10));
  }
  CHECK(poisson_truncation_point(1.0) <= 40);
  CHECK_THROWS_AS(poisson_pmf(0.0, 1), DomainError);
}

TEST_CASE("tv distance") {
  const auto po = poisson_distribution(1.0);
  CHECK(tv_distance(po, po).distance == 0.0);
  const auto r = tv_distance(point(0), po);
  CHECK(r.distance == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK(r.truncation_mass < 1e-12);
  CHECK(tv_distance(point(0), point(3)).distance == 1.0);
  CHECK(tv_distance(po, point(0)).distance == doctest::Approx(r.distance).epsilon(1e-15));
  // Support far beyond the stored Poisson range still counts against the reference.
  CHECK(tv_distance(point(100), po).distance == doctest::Approx(1.0).epsilon(1e-12));

  CountDistribution bad;
  bad.pmf[0] = 0.5;
  CHECK_THROWS_AS(tv_distance(bad, po), DomainError);
}

TEST_CASE("tv matches an independent oracle on quenched laws") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto x = sample_sequence(BiasSchedule::log_power(1.0), (1u << 12) + 11, seed);
    const auto law = quenched_distribution(window_histogram(x, 12));
    const double want = oracle::tv(law.pmf, 1.0);
    CHECK(tv_distance(law, poisson_distribution(1.0)).distance == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("tv triangle inequality and range on random triples") {
  std::mt19937_64 rng(5);
  const auto po = poisson_distribution(1.0);
  for (int t = 0; t < 1000; ++t) {
    const auto a = random_law(rng), b = random_law(rng);
    const auto c = t % 3 == 0 ? po : random_law(rng);
    const double ab = tv_distance(a, b).distance;
    const double bc = tv_distance(b, c).distance;
    const double ac = tv_distance(a, c).distance;
    REQUIRE(ac <= ab + bc + 1e-12);
    REQUIRE((ab >= 0.0 && ab <= 1.0));
    REQUIRE(tv_distance(a, a).distance == 0.0);
  }
}

TEST_CASE("aggregate annealed") {
  const CountDistribution one = point(1);
  const auto single = aggregate_annealed(std::vector<CountDistribution>{one});
  CHECK(single.mean.pmf == one.pmf);
  CHECK(single.stderr.at(1) == 0.0);
  CHECK(single.samples == 1);

  const auto two = aggregate_annealed(std::vector<CountDistribution>{point(0), point(1)});
  CHECK(two.mean(0) == 0.5);
  CHECK(two.mean(1) == 0.5);
  CHECK(two.stderr.at(0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(aggregate_annealed(std::vector<CountDistribution>{}), DomainError);

  std::mt19937_64 rng(9);
  std::vector<CountDistribution> laws;
  double mean_of_means = 0.0;
  for (int t = 0; t < 30; ++t) {
    laws.push_back(random_law(rng));
    mean_of_means += laws.back().mean() / 30.0;
  }
  const auto agg = aggregate_annealed(laws);
  CHECK(agg.mean.mean() == doctest::Approx(mean_of_means).epsilon(1e-12));
  CHECK(agg.mean.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("aggregate of zero-schedule quenched laws at k = 16 is close to Po(1)") {
  std::vector<CountDistribution> laws;
  for (std::uint64_t t = 0; t < 200; ++t) {
    const auto x = sample_sequence(BiasSchedule::zero(), (1u << 16) + 15, derive_seed(31, t));
    laws.push_back(quenched_distribution(window_histogram(x, 16)));
  }
  const auto agg = aggregate_annealed(laws);
  CHECK(agg.mean.mean() == 1.0);
  for (unsigned m = 0; m <= 6; ++m) {
    const double se = agg.stderr.count(m) ? agg.stderr.at(m) : 0.0;
    CHECK(std::abs(agg.mean(m) - poisson_pmf(1.0, m)) <= 4.0 * se + 1e-6);
  }
}

TEST_CASE("normal cdf and quantile") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(normal_cdf(-1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-14));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
  for (double p : {1e-10, 0.001, 0.02425, 0.3, 0.5, 0.9, 0.99999}) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
  CHECK_THROWS_AS(normal_quantile(1.0), DomainError);
}

TEST_CASE("Wilson intervals") {
  CHECK(binomial_ci(0, 40, 0.95).contains(0.0));
  CHECK(binomial_ci(40, 40, 0.95).contains(1.0));
  const auto half = binomial_ci(50, 100, 0.95);
  CHECK(half.lower == doctest::Approx(0.404).epsilon(2e-3));
  CHECK(half.upper == doctest::Approx(0.596).epsilon(2e-3));
  CHECK((half.lower + half.upper) / 2.0 == doctest::Approx(0.5));
  for (std::uint64_t s : {0u, 3u, 17u, 60u}) {
    const double n = 60.0, p = s / n, z = 1.959963984540054;
    const double centre = (p + z * z / (2 * n)) / (1 + z * z / n);
    const double half_width = z / (1 + z * z / n) * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
    const auto ci = binomial_ci(s, 60, 0.95);
    CHECK(ci.lower == doctest::Approx(std::max(0.0, centre - half_width)).epsilon(1e-12));
    CHECK(ci.upper == doctest::Approx(std::min(1.0, centre + half_width)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(binomial_ci(5, 4, 0.95), DomainError);
  CHECK_THROWS_AS(binomial_ci(0, 0, 0.95), DomainError);
  CHECK_THROWS_AS(wilson_interval(0.5, 10, 1.0), DomainError);
}
