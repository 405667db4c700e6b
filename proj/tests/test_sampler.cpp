#include <bit>
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "pgl/errors.hpp"
#include "pgl/parallel.hpp"
#include "pgl/reference.hpp"
#include "pgl/sampler.hpp"

using namespace pgl;

namespace {

double plus_fraction(const PackedSequence& x) {
  std::uint64_t plus = 0;
  for (std::uint64_t n = 1; n <= x.length(); ++n) plus += x.bit(n);
  return static_cast<double>(plus) / static_cast<double>(x.length());
}

}  // namespace

TEST_CASE("rng is a pure function of (seed, counter)") {
  const CounterRng a(42), b(42), c(43);
  CHECK(a.at(0) == b.at(0));
  CHECK(a.at(12345) == b.at(12345));
  CHECK(a.at(0) != c.at(0));
  CHECK(a.split(1).at(0) != a.split(2).at(0));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = a.uniform(i);
    CHECK((u >= 0.0 && u < 1.0));
  }
}

TEST_CASE("bernoulli_bit thresholds") {
  CHECK_FALSE(bernoulli_bit(0, -0.5));
  CHECK(bernoulli_bit(~std::uint64_t{0}, 0.5));
  CHECK(bernoulli_bit(0, 0.0));
  CHECK_FALSE(bernoulli_bit(std::uint64_t{1} << 63, 0.0));
  CHECK(bernoulli_bit((std::uint64_t{1} << 63) - 1, 0.0));
}

TEST_CASE("sample_sequence marginals") {
  const auto x = sample_sequence(BiasSchedule::zero(), 1000000, 9);
  CHECK(std::abs(plus_fraction(x) - 0.5) * 2.0 < 4.0 / std::sqrt(1e6));

  const auto y = sample_sequence(BiasSchedule::constant(0.49), 10000, 11);
  const double sigma = std::sqrt(0.99 * 0.01 / 1e4);
  CHECK(std::abs(plus_fraction(y) - 0.99) < 4.0 * sigma);

  const auto neg = sample_sequence(BiasSchedule::constant(-0.3), 100000, 3);
  CHECK(std::abs(plus_fraction(neg) - 0.2) < 4.0 * std::sqrt(0.16 / 1e5));
}

TEST_CASE("sample_sequence determinism and purity") {
  const auto s = BiasSchedule::log_power(0.5);
  const auto a = sample_sequence(s, 100003, 5);
  const auto b = sample_sequence(s, 100003, 5);
  CHECK(a == b);
  CHECK(a.length() == 100003);
  CHECK(a.words().size() == (100003 + 63) / 64);
  CHECK(a.seed() == 5);
  CHECK_FALSE(a == sample_sequence(s, 100003, 6));

  const auto longer = sample_sequence(s, 250000, 5);
  for (std::uint64_t n = 1; n <= a.length(); n += 37) REQUIRE(a.bit(n) == longer.bit(n));
  // Tail bits of the last word stay clear.
  const unsigned used = a.length() % 64;
  CHECK((a.words().back() >> used) == 0);

  CHECK(a == reference::sample_sequence(s, 100003, 5));
  const int saved = parallel::max_threads();
  parallel::set_threads(3);
  CHECK(a == sample_sequence(s, 100003, 5));
  parallel::set_threads(saved);
}

TEST_CASE("sample_sequence errors") {
  CHECK_THROWS_AS(sample_sequence(BiasSchedule::zero(), 0, 1), DomainError);
  CHECK_THROWS_AS(sample_sequence(BiasSchedule::zero(), kMaxSequenceLength + 1, 1), ResourceError);
}

TEST_CASE("binomial moments of length-64 windows under the zero schedule") {
  const auto x = sample_sequence(BiasSchedule::zero(), 64 * 10000, 77);
  double sum = 0.0, sum2 = 0.0;
  for (std::uint64_t w : x.words()) {
    const double c = static_cast<double>(std::popcount(w));
    sum += c;
    sum2 += c * c;
  }
  const double n = 10000.0;
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean - 32.0) < 4.0 * std::sqrt(16.0 / n));
  // Var of the sample variance for Binomial(64, 1/2): (mu4 - sigma^4) / n with mu4 = 3*256 - 2*16*... ~ 2 sigma^4.
  CHECK(std::abs(var - 16.0) < 4.0 * std::sqrt(2.0 * 256.0 / n));
}

TEST_CASE("sample_word") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Word w = sample_word(1, seed);
    CHECK(w.k == 1);
    CHECK((w.symbol(1) == 1 || w.symbol(1) == -1));
    CHECK(w.bits < 2);
  }
  CHECK(sample_word(16, 99) == sample_word(16, 99));
  CHECK(sample_word(60, 1).bits < (std::uint64_t{1} << 60));
  CHECK_THROWS_AS(sample_word(0, 1), DomainError);
  CHECK_THROWS_AS(sample_word(61, 1), DomainError);
}

TEST_CASE("sample_word chi-square at k=4 over 1e5 draws") {
  const CounterRng rng(2024);
  std::vector<double> counts(16, 0.0);
  const int draws = 100000;
  for (int t = 0; t < draws; ++t) counts[sample_word(4, rng, t).bits] += 1.0;
  double chi2 = 0.0;
  const double expected = draws / 16.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // Upper 1e-4 quantile of chi-square with 15 degrees of freedom.
  CHECK(chi2 < 44.26);
}

TEST_CASE("word helpers") {
  const Word w = Word::from_symbols({1, -1, 1, 1});
  CHECK(w.k == 4);
  CHECK(w.bits == 0b1101);
  CHECK(w.symbol(2) == -1);
  CHECK(w.plus_count() == 3);
  CHECK(w.symbol_sum() == 2);
  CHECK_THROWS_AS(Word::from_symbols({1, 0}), DomainError);
}

TEST_CASE("packed sequence windows across word boundaries") {
  std::vector<int> s(200);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = (i % 3 == 0 || i % 7 == 2) ? 1 : -1;
  const auto x = PackedSequence::from_symbols(s);
  for (unsigned k : {1u, 5u, 33u, 60u, 64u}) {
    for (std::uint64_t j = 1; j + k - 1 <= s.size(); ++j) {
      std::uint64_t code = 0;
      for (unsigned i = 0; i < k; ++i) code |= std::uint64_t(s[j - 1 + i] == 1) << i;
      REQUIRE(x.window(j, k) == code);
    }
  }
}

TEST_CASE("packed dump round trip") {
  const auto x = sample_sequence(BiasSchedule::log_power(1.0), 1000, 3);
  std::stringstream buf;
  write_packed(buf, x, 9);
  const std::string bytes = buf.str();
  CHECK(bytes.size() == 16 + 125);
  CHECK(bytes.substr(0, 4) == "PGL1");
  CHECK(static_cast<unsigned char>(bytes[4]) == 9);
  CHECK(static_cast<unsigned char>(bytes[8]) == (1000 & 0xFF));
  CHECK(static_cast<unsigned char>(bytes[9]) == (1000 >> 8));
  // Byte 16 holds x_1..x_8, x_1 in its low bit.
  for (unsigned n = 1; n <= 8; ++n) CHECK(((static_cast<unsigned char>(bytes[16]) >> (n - 1)) & 1U) == x.bit(n));

  std::stringstream in(bytes);
  const PackedDump d = read_packed(in);
  CHECK(d.k == 9);
  CHECK(d.sequence == x);

  std::stringstream bad("XXXX");
  CHECK_THROWS_AS(read_packed(bad), DomainError);
  std::stringstream truncated(bytes.substr(0, 40));
  CHECK_THROWS(read_packed(truncated));
}
