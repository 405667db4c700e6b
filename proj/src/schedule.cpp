#include "pgl/schedule.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "pgl/errors.hpp"

namespace pgl {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string default_label(const BiasSchedule::Kind& kind) {
  return std::visit(Overloaded{
                        [](const ZeroBias&) { return std::string("zero"); },
                        [](const ConstantBias& c) { return "const:" + format_double(c.value); },
                        [](const LogPowerBias& p) {
                          std::string s = "logpow:" + format_double(p.exponent);
                          if (p.cap != kDefaultCap) s += ":cap=" + format_double(p.cap);
                          if (p.start != 2) s += ":n0=" + std::to_string(p.start);
                          return s;
                        },
                        [](const TableBias& t) {
                          return "table[" + std::to_string(t.values.size()) + "]" +
                                 (t.tail == TableTail::Zero ? ":tail=zero" : "");
                        },
                    },
                    kind);
}

double log_power_value(const LogPowerBias& p, std::uint64_t n) {
  if (n < p.start || n < 2) return p.cap;
  const double lg = std::log(static_cast<double>(n)) / std::log(kLogBase);
  return std::min(p.cap, std::pow(lg, -p.exponent));
}

double table_value(const TableBias& t, std::uint64_t n) {
  if (n <= t.values.size()) return t.values[n - 1];
  if (t.tail == TableTail::Zero || t.values.empty()) return 0.0;
  return t.values.back();
}

}  // namespace

BiasSchedule::BiasSchedule(Kind kind, std::string label)
    : kind_(std::move(kind)), label_(label.empty() ? default_label(kind_) : std::move(label)) {}

bool BiasSchedule::is_zero() const noexcept {
  if (std::holds_alternative<ZeroBias>(kind_)) return true;
  if (const auto* c = std::get_if<ConstantBias>(&kind_)) return c->value == 0.0;
  if (const auto* t = std::get_if<TableBias>(&kind_)) {
    const bool head = std::all_of(t->values.begin(), t->values.end(), [](double v) { return v == 0.0; });
    return head;
  }
  return false;
}

double BiasSchedule::gamma(std::uint64_t n) const {
  if (n == 0) throw DomainError("gamma: index must be >= 1");
  return std::visit(Overloaded{
                        [](const ZeroBias&) { return 0.0; },
                        [](const ConstantBias& c) { return c.value; },
                        [n](const LogPowerBias& p) { return log_power_value(p, n); },
                        [n](const TableBias& t) { return table_value(t, n); },
                    },
                    kind_);
}

void BiasSchedule::fill(std::uint64_t first, std::span<double> out) const {
  if (first == 0) throw DomainError("gamma: index must be >= 1");
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  auto index = [first](std::size_t t) {
    return t > kMax - first ? kMax : first + t;
  };
  std::visit(Overloaded{
                 [&](const ZeroBias&) { std::fill(out.begin(), out.end(), 0.0); },
                 [&](const ConstantBias& c) { std::fill(out.begin(), out.end(), c.value); },
                 [&](const LogPowerBias& p) {
                   for (std::size_t t = 0; t < out.size(); ++t) out[t] = log_power_value(p, index(t));
                 },
                 [&](const TableBias& tb) {
                   for (std::size_t t = 0; t < out.size(); ++t) out[t] = table_value(tb, index(t));
                 },
             },
             kind_);
}

ValidationReport validate(const BiasSchedule& schedule, std::span<const std::uint64_t> extra_probes) {
  ValidationReport report;
  auto& v = report.violations;

  std::visit(Overloaded{
                 [](const ZeroBias&) {},
                 [](const ConstantBias&) {},
                 [&](const LogPowerBias& p) {
                   if (!(p.exponent > 0.0)) v.push_back("logpow exponent must be > 0");
                   if (!(p.cap > 0.0 && p.cap < 0.5)) v.push_back("logpow cap must lie in (0, 1/2)");
                   if (p.start < 2) v.push_back("logpow n0 must be >= 2");
                 },
                 [&](const TableBias& t) {
                   if (t.values.empty()) v.push_back("table must contain at least one value");
                   for (std::size_t i = 0; i < t.values.size(); ++i) {
                     if (!(std::abs(t.values[i]) < 0.5)) {
                       v.push_back("gamma out of (-1/2,1/2) at table row " + std::to_string(i + 1));
                     }
                   }
                 },
             },
             schedule.kind());

  std::vector<std::uint64_t> probes;
  for (int e = 0; e <= 40; ++e) probes.push_back(std::uint64_t{1} << e);
  probes.insert(probes.end(), extra_probes.begin(), extra_probes.end());

  const bool monotone = std::holds_alternative<LogPowerBias>(schedule.kind());
  std::size_t out_of_range = 0;
  std::string first_bad;
  for (std::uint64_t n : probes) {
    if (n == 0) {
      v.push_back("probe index 0 is not a valid position");
      continue;
    }
    const double g = schedule.gamma(n);
    if (!(std::abs(g) < 0.5) && out_of_range++ == 0) {
      first_bad = "gamma out of (-1/2,1/2) at n=" + std::to_string(n) + " (gamma=" + format_double(g) + ")";
    }
    if (monotone && n >= 2 && n < std::numeric_limits<std::uint64_t>::max()) {
      if (schedule.gamma(n + 1) > g) v.push_back("gamma increases at n=" + std::to_string(n));
    }
  }
  if (out_of_range > 0) {
    if (out_of_range > 1) first_bad += " and at " + std::to_string(out_of_range - 1) + " further probes";
    v.push_back(first_bad);
  }
  return report;
}

std::string_view to_string(KakutaniClass c) {
  switch (c) {
    case KakutaniClass::Equivalent:
      return "Equivalent";
    case KakutaniClass::Singular:
      return "Singular";
    case KakutaniClass::Unknown:
      break;
  }
  return "Unknown";
}

KakutaniClass classify_kakutani(const BiasSchedule& schedule) {
  return std::visit(Overloaded{
                        [](const ZeroBias&) { return KakutaniClass::Equivalent; },
                        [](const ConstantBias& c) {
                          return c.value == 0.0 ? KakutaniClass::Equivalent : KakutaniClass::Singular;
                        },
                        // sum log^{-2c} n diverges for every c > 0
                        [](const LogPowerBias& p) {
                          return p.exponent > 0.0 ? KakutaniClass::Singular : KakutaniClass::Unknown;
                        },
                        [](const TableBias& t) {
                          if (t.tail == TableTail::Zero || t.values.empty()) return KakutaniClass::Equivalent;
                          return t.values.back() == 0.0 ? KakutaniClass::Equivalent : KakutaniClass::Singular;
                        },
                    },
                    schedule.kind());
}

double cesaro_average(const BiasSchedule& schedule, std::uint64_t N) {
  if (N == 0) throw DomainError("cesaro_average: N must be >= 1");
  constexpr std::size_t kChunk = 4096;
  std::vector<double> buf(kChunk);
  long double sum = 0.0L;
  for (std::uint64_t first = 1; first <= N; first += kChunk) {
    const auto len = static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, N - first + 1));
    schedule.fill(first, std::span<double>(buf.data(), len));
    for (std::size_t t = 0; t < len; ++t) sum += buf[t];
  }
  return static_cast<double>(sum / static_cast<long double>(N));
}

std::optional<std::uint64_t> first_index_below(const BiasSchedule& schedule, double bound, bool absolute) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  auto below = [&](double g) { return (absolute ? std::abs(g) : g) < bound; };
  return std::visit(
      Overloaded{
          [&](const ZeroBias&) -> std::optional<std::uint64_t> {
            if (below(0.0)) return 1;
            return std::nullopt;
          },
          [&](const ConstantBias& c) -> std::optional<std::uint64_t> {
            if (below(c.value)) return 1;
            return std::nullopt;
          },
          [&](const LogPowerBias&) -> std::optional<std::uint64_t> {
            if (!below(schedule.gamma(kMax))) return std::nullopt;
            if (below(schedule.gamma(1))) return 1;
            std::uint64_t lo = 1, hi = kMax;  // !below(gamma(lo)), below(gamma(hi))
            while (hi - lo > 1) {
              const std::uint64_t mid = lo + (hi - lo) / 2;
              if (below(schedule.gamma(mid))) {
                hi = mid;
              } else {
                lo = mid;
              }
            }
            return hi;
          },
          [&](const TableBias& t) -> std::optional<std::uint64_t> {
            const double tail = (t.tail == TableTail::Zero || t.values.empty()) ? 0.0 : t.values.back();
            if (!below(tail)) return std::nullopt;
            std::uint64_t n = 1;
            for (std::size_t i = 0; i < t.values.size(); ++i) {
              if (!below(t.values[i])) n = i + 2;
            }
            return n;
          },
      },
      schedule.kind());
}

namespace {

double parse_real(std::string_view text, std::size_t offset) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ParseError("expected a real number, got '" + std::string(text) + "'", offset);
  }
  return value;
}

std::uint64_t parse_unsigned(std::string_view text, std::size_t offset) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ParseError("expected a non-negative integer, got '" + std::string(text) + "'", offset);
  }
  return value;
}

struct Field {
  std::string_view text;
  std::size_t offset;
};

std::vector<Field> split_fields(std::string_view spec) {
  std::vector<Field> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = spec.find(':', start);
    const std::size_t stop = colon == std::string_view::npos ? spec.size() : colon;
    fields.push_back({spec.substr(start, stop - start), start});
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  return fields;
}

std::vector<double> read_table(const std::string& path, std::size_t offset) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open table file '" + path + "'", offset);
  std::vector<double> values;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    try {
      values.push_back(parse_real(std::string_view(line).substr(first, last - first + 1), 0));
    } catch (const ParseError&) {
      throw ParseError("bad value on line " + std::to_string(row) + " of '" + path + "'", offset);
    }
  }
  if (values.empty()) throw ParseError("table file '" + path + "' has no values", offset);
  return values;
}

}  // namespace

BiasSchedule parse_schedule(std::string_view spec) {
  const auto fields = split_fields(spec);
  const auto& head = fields.front();

  if (head.text == "zero") {
    if (fields.size() > 1) throw ParseError("'zero' takes no arguments", fields[1].offset);
    return BiasSchedule::zero();
  }
  if (head.text == "const") {
    if (fields.size() != 2) throw ParseError("expected const:<c0>", head.offset + head.text.size());
    return BiasSchedule::constant(parse_real(fields[1].text, fields[1].offset));
  }
  if (head.text == "logpow") {
    if (fields.size() < 2) throw ParseError("expected logpow:<c>", head.offset + head.text.size());
    LogPowerBias p;
    p.exponent = parse_real(fields[1].text, fields[1].offset);
    for (std::size_t i = 2; i < fields.size(); ++i) {
      const auto& f = fields[i];
      if (f.text.starts_with("cap=")) {
        p.cap = parse_real(f.text.substr(4), f.offset + 4);
      } else if (f.text.starts_with("n0=")) {
        p.start = parse_unsigned(f.text.substr(3), f.offset + 3);
      } else {
        throw ParseError("unknown logpow option '" + std::string(f.text) + "'", f.offset);
      }
    }
    return BiasSchedule(p);
  }
  if (head.text == "table") {
    if (fields.size() < 2 || fields[1].text.empty()) {
      throw ParseError("expected table:<path>", head.offset + head.text.size());
    }
    TableTail tail = TableTail::RepeatLast;
    std::size_t path_end = fields.size();
    const auto& last = fields.back();
    if (fields.size() > 2 && last.text.starts_with("tail=")) {
      path_end = fields.size() - 1;
      const auto rule = last.text.substr(5);
      if (rule == "zero") {
        tail = TableTail::Zero;
      } else if (rule != "last") {
        throw ParseError("tail must be 'last' or 'zero'", last.offset + 5);
      }
    }
    // A path may itself contain ':'; rejoin everything between the head and the tail option.
    const std::size_t path_begin = fields[1].offset;
    const std::size_t path_stop = fields[path_end - 1].offset + fields[path_end - 1].text.size();
    const std::string path(spec.substr(path_begin, path_stop - path_begin));
    return BiasSchedule(TableBias{read_table(path, path_begin), tail}, std::string(spec));
  }
  throw ParseError("unknown schedule kind '" + std::string(head.text) + "'", head.offset);
}

}  // namespace pgl
