#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "pgl/counter.hpp"
#include "pgl/errors.hpp"
#include "pgl/parallel.hpp"
#include "pgl/reference.hpp"

using namespace pgl;

namespace {

PackedSequence all_plus(std::uint64_t length) { return PackedSequence::from_symbols(std::vector<int>(length, 1)); }

}  // namespace

TEST_CASE("hand-enumerated histograms") {
  const auto x = all_plus(5);
  const auto h = window_histogram(x, 2);
  CHECK(h.count(0b11) == 4);
  CHECK(h.distinct() == 1);
  CHECK(h.total() == 4);
  CHECK(count_word(x, Word::from_symbols({1, 1})) == 4);
  CHECK(count_word(x, Word::from_symbols({-1, 1})) == 0);

  const auto law = quenched_distribution(h);
  CHECK(law(0) == 0.75);
  CHECK(law(4) == 0.25);

  const auto x1 = all_plus(2);
  const auto law1 = quenched_distribution(window_histogram(x1, 1));
  CHECK(law1(0) == 0.5);
  CHECK(law1(2) == 0.5);
}

TEST_CASE("k = 1 counts over positions 1..2") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto x = oracle::random_sequence(rng, 2);
    const auto h = window_histogram(x, 1);
    CHECK(h.count(0) + h.count(1) == 2);
    CHECK(h.count(1) == std::uint64_t(x.bit(1)) + x.bit(2));
  }
}

TEST_CASE("naive substring oracle for k <= 8") {
  std::mt19937_64 rng(7);
  for (unsigned k = 1; k <= 8; ++k) {
    for (int t = 0; t < 6; ++t) {
      const auto x = oracle::random_sequence(rng, (std::uint64_t{1} << k) + k - 1, t % 2 ? 0.5 : 0.8);
      const auto h = window_histogram(x, k);
      const auto want = oracle::substring_counts(x, k);
      std::vector<std::pair<std::uint64_t, std::uint64_t>> flat(want.begin(), want.end());
      REQUIRE(h.nonzero() == flat);
      CHECK(h.distinct() == want.size());
    }
  }
}

TEST_CASE("conservation and mean one for k in 1..24") {
  for (unsigned k = 1; k <= 24; ++k) {
    const auto x = sample_sequence(BiasSchedule::log_power(0.5), (std::uint64_t{1} << k) + k - 1, k);
    const auto h = window_histogram(x, k);
    REQUIRE(h.total() == (std::uint64_t{1} << k));
    const auto law = quenched_distribution(h);
    CHECK(law.mean() == 1.0);
    CHECK(law.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(law.max_support() <= (std::uint64_t{1} << k));
    std::uint64_t tallied = 0;
    for (const auto& [m, c] : h.multiplicity_tally()) tallied += m * c;
    CHECK(tallied == (std::uint64_t{1} << k));
  }
}

TEST_CASE("zero schedule k = 20 conservation") {
  const auto x = sample_sequence(BiasSchedule::zero(), (1u << 20) + 19, 1);
  CHECK(window_histogram(x, 20).total() == (1u << 20));
}

TEST_CASE("parallel histogram equals the serial reference for every thread count") {
  const int saved = parallel::max_threads();
  for (unsigned k : {12u, 17u, 20u}) {
    const auto x = sample_sequence(BiasSchedule::log_power(1.0), (std::uint64_t{1} << k) + k - 1, 100 + k);
    const auto ref = reference::window_histogram(x, k);
    for (int threads : {1, 2, 5}) {
      parallel::set_threads(threads);
      CHECK(window_histogram(x, k) == ref);
    }
  }
  parallel::set_threads(saved);
}

TEST_CASE("sparse path agrees with the dense path") {
  const unsigned k = 14;
  const auto x = sample_sequence(BiasSchedule::zero(), (1u << k) + k - 1, 5);
  HistogramPolicy sparse;
  sparse.dense_cap = 10;
  const auto hs = window_histogram(x, k, sparse);
  const auto hd = window_histogram(x, k);
  CHECK_FALSE(hs.is_dense());
  CHECK(hd.is_dense());
  CHECK(hs == hd);
  CHECK(hs.distinct() == hd.distinct());
  CHECK(quenched_distribution(hs).pmf == quenched_distribution(hd).pmf);
}

TEST_CASE("count_word matches histogram lookup") {
  const unsigned k = 16;
  const auto x = sample_sequence(BiasSchedule::log_power(0.5), (1u << k) + k - 1, 8);
  const auto h = window_histogram(x, k);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Word w = sample_word(k, seed);
    CHECK(count_word(x, w) == h.count(w.bits));
  }
  const Word present{k, x.window(1, k)};
  CHECK(count_word(x, present) >= 1);
}

TEST_CASE("histogram errors") {
  const auto x = all_plus(10);
  CHECK_THROWS_AS(window_histogram(x, 4), DomainError);
  CHECK_THROWS_AS(window_histogram(x, 0), DomainError);
  CHECK_THROWS_AS(count_word(x, Word{4, 0}), DomainError);
  HistogramPolicy tight;
  tight.memory_budget = 1024;
  const auto y = all_plus((1u << 12) + 11);
  CHECK_THROWS_AS(window_histogram(y, 12, tight), ResourceError);
}

TEST_CASE("csv exports") {
  const auto h = window_histogram(all_plus(5), 2);
  std::ostringstream a;
  write_histogram_csv(a, h);
  CHECK(a.str() == "word_code,count\n3,4\n");
  std::ostringstream b;
  write_distribution_csv(b, quenched_distribution(h));
  CHECK(b.str() == "m,probability\n0,0.75\n4,0.25\n");
}
