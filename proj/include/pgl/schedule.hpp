#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pgl {

/// Base of the logarithm in log-power schedules. Threshold statements are invariant
/// under a change of base up to constants; swap for 2.0 to use log2.
inline constexpr double kLogBase = std::numbers::e;

inline constexpr double kDefaultCap = 0.49;

enum class TableTail { RepeatLast, Zero };

struct ZeroBias {};

struct ConstantBias {
  double value = 0.0;
};

/// gamma(n) = min(cap, log^{-exponent} n) for n >= start, cap below start.
struct LogPowerBias {
  double exponent = 1.0;
  double cap = kDefaultCap;
  std::uint64_t start = 2;
};

/// gamma(n) = values[n - 1] for n <= size; beyond that, the tail rule applies.
struct TableBias {
  std::vector<double> values;
  TableTail tail = TableTail::RepeatLast;
};

/// The sequence of biases gamma_n = nu_n({+1}) - 1/2 of a product measure on {-1, +1}^N.
/// Immutable after construction.
class BiasSchedule {
 public:
  using Kind = std::variant<ZeroBias, ConstantBias, LogPowerBias, TableBias>;

  BiasSchedule() : BiasSchedule(ZeroBias{}) {}
  explicit BiasSchedule(Kind kind, std::string label = {});

  static BiasSchedule zero() { return BiasSchedule(ZeroBias{}); }
  static BiasSchedule constant(double value) { return BiasSchedule(ConstantBias{value}); }
  static BiasSchedule log_power(double exponent, double cap = kDefaultCap, std::uint64_t start = 2) {
    return BiasSchedule(LogPowerBias{exponent, cap, start});
  }
  static BiasSchedule table(std::vector<double> values, TableTail tail = TableTail::RepeatLast) {
    return BiasSchedule(TableBias{std::move(values), tail});
  }

  /// gamma_n for n >= 1. Throws DomainError for n = 0.
  double gamma(std::uint64_t n) const;

  /// out[t] = gamma(first + t). Saturates at index 2^64 - 1 instead of wrapping.
  void fill(std::uint64_t first, std::span<double> out) const;

  const Kind& kind() const noexcept { return kind_; }
  const std::string& label() const noexcept { return label_; }
  bool is_zero() const noexcept;

 private:
  Kind kind_;
  std::string label_;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const noexcept { return violations.empty(); }
};

/// Checks parameter sanity, |gamma(n)| < 1/2 and, for log-power schedules, monotonicity on
/// the probe grid {1, 2, 4, ..., 2^40} plus `extra_probes` (and each probe's successor).
ValidationReport validate(const BiasSchedule& schedule, std::span<const std::uint64_t> extra_probes = {});

enum class KakutaniClass { Equivalent, Singular, Unknown };

std::string_view to_string(KakutaniClass c);

/// Equivalence with the uniform product measure, decided from the closed form of sum gamma_n^2.
KakutaniClass classify_kakutani(const BiasSchedule& schedule);

/// N^{-1} sum_{n=1}^{N} gamma_n. Throws DomainError for N = 0.
double cesaro_average(const BiasSchedule& schedule, std::uint64_t N);

/// Parses `zero`, `const:<c0>`, `logpow:<c>[:cap=<v>][:n0=<n>]`, or
/// `table:<path>[:tail=last|zero]`. Throws ParseError.
BiasSchedule parse_schedule(std::string_view spec);

/// Smallest n such that gamma(m) < bound (|gamma(m)| < bound when `absolute`) for every
/// m >= n; nullopt if there is none below 2^64. Exact for every schedule kind, since
/// log-power schedules are non-increasing.
std::optional<std::uint64_t> first_index_below(const BiasSchedule& schedule, double bound, bool absolute = false);

}  // namespace pgl
