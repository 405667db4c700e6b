#include "pgl/analytics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "pgl/errors.hpp"
#include "pgl/parallel.hpp"
#include "pgl/rng.hpp"
#include "pgl/stats.hpp"

namespace pgl {

void ChenSteinParams::validate() const {
  if (k == 0 || k > kMaxWordLength) throw DomainError("k must lie in [1, 60]");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  if (!(theta > 0.0 && theta < 0.5)) throw DomainError("theta must lie in (0, 1/2)");
  if (exact_cap > kMaxExactCap) throw DomainError("exact_cap must be <= 26");
  if (mc_samples == 0) throw DomainError("mc_samples must be >= 1");
}

std::string_view to_string(TermMode mode) {
  switch (mode) {
    case TermMode::Exact:
      return "exact";
    case TermMode::Bound:
      return "bound";
    case TermMode::MonteCarlo:
      break;
  }
  return "monte-carlo";
}

void to_json(nlohmann::json& out, const ChenSteinReport& r) {
  out = nlohmann::json{{"k", r.k},
                       {"lambda", r.lambda},
                       {"A", r.A},
                       {"B", r.B},
                       {"B_mode", to_string(r.B_mode)},
                       {"C", r.C},
                       {"C_mode", to_string(r.C_mode)},
                       {"C_stderr", r.C_stderr},
                       {"total", r.total},
                       {"j0", nullptr},
                       {"epsilon", r.epsilon},
                       {"theta", r.theta}};
  if (r.j0) out["j0"] = *r.j0;
}

namespace {

constexpr std::uint64_t kGrayBlock = std::uint64_t{1} << 12;

std::vector<double> gammas(const BiasSchedule& schedule, std::uint64_t first, std::size_t count) {
  std::vector<double> g(count);
  schedule.fill(first, g);
  return g;
}

void require_exact(unsigned k, unsigned cap, const char* what) {
  if (k > cap || k > kMaxExactCap) {
    throw CapabilityError(std::string(what) + ": k=" + std::to_string(k) + " exceeds the exact-enumeration cap " +
                          std::to_string(std::min(cap, kMaxExactCap)));
  }
}

/// Per-position factors f_i(+1), f_i(-1) of a product over a word, with the ratios used
/// by Gray-code steps.
struct Factors {
  std::vector<double> plus, minus, up, down;

  explicit Factors(std::size_t k) : plus(k), minus(k), up(k), down(k) {}
  void finish() {
    for (std::size_t i = 0; i < plus.size(); ++i) {
      up[i] = plus[i] / minus[i];
      down[i] = minus[i] / plus[i];
    }
  }
  double product(std::uint64_t bits) const {
    double p = 1.0;
    for (std::size_t i = 0; i < plus.size(); ++i) p *= ((bits >> i) & 1U) ? plus[i] : minus[i];
    return p;
  }
};

Factors p_factors(std::span<const double> g) {
  Factors f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    f.plus[i] = 1.0 + 2.0 * g[i];
    f.minus[i] = 1.0 - 2.0 * g[i];
  }
  f.finish();
  return f;
}

/// Visits (word, product) for Gray indices [g0, g0 + len). Each block restarts from a
/// freshly computed product, so rounding drift is bounded by the block length.
template <class Visit>
void gray_products(const Factors& f, std::uint64_t g0, std::uint64_t len, Visit&& visit) {
  std::uint64_t w = g0 ^ (g0 >> 1);
  double prod = f.product(w);
  visit(w, prod);
  for (std::uint64_t g = g0 + 1; g < g0 + len; ++g) {
    const auto bit = static_cast<unsigned>(std::countr_zero(g));
    w ^= std::uint64_t{1} << bit;
    prod *= ((w >> bit) & 1U) ? f.up[bit] : f.down[bit];
    visit(w, prod);
  }
}

/// sum over all words of fn(product), in a fixed block order.
template <class Fn>
double gray_sum(const Factors& f, Fn&& fn) {
  const std::uint64_t total = std::uint64_t{1} << f.plus.size();
  const std::uint64_t block = std::min(total, kGrayBlock);
  const auto nblocks = static_cast<std::size_t>(total / block);
  return parallel::ordered_sum<double>(nblocks, [&](std::size_t b) {
    double s = 0.0;
    gray_products(f, std::uint64_t{b} * block, block, [&](std::uint64_t, double p) { s += fn(p); });
    return s;
  });
}

/// F_r(s) = prod_{h = r mod d} (1/2 + s gamma) over the k + d positions of the juxtaposed word.
Factors residue_factors(std::span<const double> g, std::size_t d) {
  Factors f(d);
  std::fill(f.plus.begin(), f.plus.end(), 1.0);
  std::fill(f.minus.begin(), f.minus.end(), 1.0);
  for (std::size_t h = 0; h < g.size(); ++h) {
    f.plus[h % d] *= 0.5 + g[h];
    f.minus[h % d] *= 0.5 - g[h];
  }
  f.finish();
  return f;
}

// g = gamma_i..gamma_{j+k-1}, d = j - i >= 1.
double pair_from_gammas(std::span<const double> g, std::size_t d, unsigned k) {
  if (d >= k) {
    double p = 1.0;
    for (unsigned t = 0; t < k; ++t) p *= 1.0 + 4.0 * g[t] * g[t + d];
    return std::ldexp(p, -2 * static_cast<int>(k));
  }
  const Factors f = residue_factors(g, d);
  double p = 1.0;
  for (std::size_t r = 0; r < d; ++r) p *= f.plus[r] + f.minus[r];
  return std::ldexp(p, -static_cast<int>(k));
}

struct Moments {
  double sum = 0.0;
  double sumsq = 0.0;
  Moments& operator+=(const Moments& o) {
    sum += o.sum;
    sumsq += o.sumsq;
    return *this;
  }
};

}  // namespace

double p_jk(const BiasSchedule& schedule, std::uint64_t j, const Word& w) {
  if (j == 0) throw DomainError("p_jk: j must be >= 1");
  const auto g = gammas(schedule, j, w.k);
  double p = 1.0;
  for (unsigned i = 0; i < w.k; ++i) {
    p *= 1.0 + 2.0 * w.symbol(i + 1) * g[i];
    if (p < 1e-300 || p > 1e300) {
      double lg = 0.0;
      for (unsigned t = 0; t < w.k; ++t) lg += std::log1p(2.0 * w.symbol(t + 1) * g[t]);
      return std::exp(lg);
    }
  }
  return p;
}

double conditional_hit_prob(const BiasSchedule& schedule, std::uint64_t j, const Word& w) {
  return std::ldexp(p_jk(schedule, j, w), -static_cast<int>(w.k));
}

double mean_p_jk(const BiasSchedule& schedule, std::uint64_t j, unsigned k) {
  require_exact(k, kMaxExactCap, "mean_p_jk");
  const Factors f = p_factors(gammas(schedule, j, k));
  return std::ldexp(gray_sum(f, [](double p) { return p; }), -static_cast<int>(k));
}

double pair_expectation(const BiasSchedule& schedule, std::uint64_t i, std::uint64_t j, unsigned k,
                        unsigned exact_cap) {
  if (i == 0 || j == 0) throw DomainError("pair_expectation: indices must be >= 1");
  if (k == 0 || k > kMaxWordLength) throw DomainError("k must lie in [1, 60]");
  if (i == j) return std::ldexp(1.0, -static_cast<int>(k));
  if (i > j) std::swap(i, j);
  const std::uint64_t d = j - i;
  if (d >= k) {
    const auto gi = gammas(schedule, i, k);
    const auto gj = gammas(schedule, j, k);
    double p = 1.0;
    for (unsigned t = 0; t < k; ++t) p *= 1.0 + 4.0 * gi[t] * gj[t];
    return std::ldexp(p, -2 * static_cast<int>(k));
  }
  require_exact(k, exact_cap, "pair_expectation");
  // Both windows match w only if w is d-periodic; such words are indexed by their first d
  // symbols, and the juxtaposed word covers positions i..j+k-1.
  const Factors f = residue_factors(gammas(schedule, i, k + d), d);
  return std::ldexp(gray_sum(f, [](double p) { return p; }), -static_cast<int>(k));
}

double pair_expectation_factorized(const BiasSchedule& schedule, std::uint64_t i, std::uint64_t j, unsigned k) {
  if (i == 0 || j == 0) throw DomainError("pair_expectation: indices must be >= 1");
  if (k == 0 || k > kMaxWordLength) throw DomainError("k must lie in [1, 60]");
  if (i == j) return std::ldexp(1.0, -static_cast<int>(k));
  if (i > j) std::swap(i, j);
  const std::uint64_t d = j - i;
  if (d >= k) return pair_expectation(schedule, i, j, k);
  return pair_from_gammas(gammas(schedule, i, k + d), d, k);
}

namespace {

double exact_mean_abs(const BiasSchedule& schedule, std::uint64_t j, unsigned k) {
  const Factors f = p_factors(gammas(schedule, j, k));
  return std::ldexp(gray_sum(f, [](double p) { return std::abs(p - 1.0); }), -static_cast<int>(k));
}

Estimate monte_carlo_mean_abs(const BiasSchedule& schedule, std::uint64_t j, unsigned k, std::uint64_t samples,
                              std::uint64_t seed) {
  const Factors f = p_factors(gammas(schedule, j, k));
  const CounterRng rng(derive_seed(seed, j));
  const std::uint64_t mask = (std::uint64_t{1} << k) - 1;
  constexpr std::uint64_t kBlock = 1024;
  const auto nblocks = static_cast<std::size_t>((samples + kBlock - 1) / kBlock);
  const Moments m = parallel::ordered_sum<Moments>(nblocks, [&](std::size_t b) {
    Moments local;
    const std::uint64_t end = std::min(samples, (b + 1) * kBlock);
    for (std::uint64_t s = b * kBlock; s < end; ++s) {
      const double v = std::abs(f.product(rng.at(s) & mask) - 1.0);
      local.sum += v;
      local.sumsq += v * v;
    }
    return local;
  });
  const double n = static_cast<double>(samples);
  const double mean = m.sum / n;
  const double var = samples > 1 ? std::max(0.0, (m.sumsq - n * mean * mean) / (n - 1.0)) : 0.0;
  return {mean, std::sqrt(var / n), TermMode::MonteCarlo};
}

}  // namespace

Estimate mean_abs_p_minus_one(const BiasSchedule& schedule, std::uint64_t j, unsigned k,
                              const ChenSteinParams& params) {
  if (j == 0) throw DomainError("mean_abs_p_minus_one: j must be >= 1");
  if (k == 0 || k > kMaxWordLength) throw DomainError("k must lie in [1, 60]");
  if (k <= params.exact_cap && k <= kMaxExactCap) return {exact_mean_abs(schedule, j, k), 0.0, TermMode::Exact};
  return monte_carlo_mean_abs(schedule, j, k, params.mc_samples, params.seed);
}

ChebyshevMass chebyshev_set_mass(const BiasSchedule& schedule, std::uint64_t j, unsigned k, double theta,
                                 unsigned exact_cap) {
  if (!(theta > 0.0 && theta < 0.5)) throw DomainError("theta must lie in (0, 1/2)");
  if (j == 0) throw DomainError("chebyshev_set_mass: j must be >= 1");
  require_exact(k, exact_cap, "chebyshev_set_mass");
  const auto g = gammas(schedule, j, k);
  ChebyshevMass r;
  for (double v : g) r.variance += v * v;
  r.threshold = std::pow(r.variance, 0.5 - theta);
  r.bound = std::pow(r.variance, 2.0 * theta);
  // Ties go to the typical set; allow for rounding in the running sum.
  const double cut = r.threshold * (1.0 + 1e-12) + 1e-15;

  const std::uint64_t total = std::uint64_t{1} << k;
  const std::uint64_t block = std::min(total, kGrayBlock);
  const auto nblocks = static_cast<std::size_t>(total / block);
  const auto outside = parallel::ordered_sum<std::uint64_t>(nblocks, [&](std::size_t b) {
    const std::uint64_t g0 = std::uint64_t{b} * block;
    std::uint64_t w = g0 ^ (g0 >> 1);
    double s = 0.0;
    for (unsigned i = 0; i < k; ++i) s += ((w >> i) & 1U) ? g[i] : -g[i];
    std::uint64_t n = std::abs(s) > cut;
    for (std::uint64_t gi = g0 + 1; gi < g0 + block; ++gi) {
      const auto bit = static_cast<unsigned>(std::countr_zero(gi));
      w ^= std::uint64_t{1} << bit;
      s += ((w >> bit) & 1U) ? 2.0 * g[bit] : -2.0 * g[bit];
      n += std::abs(s) > cut;
    }
    return n;
  });
  r.mass = std::ldexp(static_cast<double>(outside), -static_cast<int>(k));
  return r;
}

double a_term(unsigned k) {
  if (k == 0 || k > kMaxWordLength) throw DomainError("k must lie in [1, 60]");
  // sum_{j=1}^{N} min(j-1, k-1) = k(k-1)/2 + (N-k)(k-1) for N = 2^k >= k; the right-hand
  // neighbours contribute the same amount.
  const long double n = std::ldexp(1.0L, static_cast<int>(k));
  const long double km1 = k - 1;
  const long double one_side = km1 * k / 2.0L + (n - k) * km1;
  return static_cast<double>((n + 2.0L * one_side) / (n * n));
}

std::optional<std::uint64_t> overlap_j0(const BiasSchedule& schedule) {
  return first_index_below(schedule, (std::pow(2.0, 0.25) - 1.0) / 2.0, true);
}

namespace {

double exact_b_term(const BiasSchedule& schedule, unsigned k) {
  const std::uint64_t n = std::uint64_t{1} << k;
  constexpr std::uint64_t kBlock = 1024;
  const auto nblocks = static_cast<std::size_t>((n + kBlock - 1) / kBlock);
  return parallel::ordered_sum<double>(nblocks, [&](std::size_t b) {
    const std::uint64_t jlo = std::max<std::uint64_t>(2, b * kBlock + 1);
    const std::uint64_t jhi = std::min(n, (b + 1) * kBlock);
    if (jlo > jhi) return 0.0;
    const std::uint64_t first = jlo > k - 1 ? jlo - (k - 1) : 1;
    const auto g = gammas(schedule, first, static_cast<std::size_t>(jhi + k - first));
    double s = 0.0;
    for (std::uint64_t j = jlo; j <= jhi; ++j) {
      const std::uint64_t ilo = j > k - 1 ? j - (k - 1) : 1;
      for (std::uint64_t i = ilo; i < j; ++i) {
        const std::size_t d = j - i;
        s += pair_from_gammas(std::span<const double>(g).subspan(i - first, k + d), d, k);
      }
    }
    return 2.0 * s;  // (i, j) and (j, i)
  });
}

struct CTerm {
  double value = 0.0;
  double stderr = 0.0;
  TermMode mode = TermMode::Exact;
};

CTerm c_term(const BiasSchedule& schedule, const ChenSteinParams& p) {
  const unsigned k = p.k;
  const std::uint64_t n = std::uint64_t{1} << k;
  const double scale = std::ldexp(1.0, -static_cast<int>(k));
  if (schedule.is_zero()) return {0.0, 0.0, TermMode::Exact};

  if (k <= p.full_c_cap && k <= p.exact_cap) {
    constexpr std::uint64_t kBlock = 64;
    const auto nblocks = static_cast<std::size_t>((n + kBlock - 1) / kBlock);
    const double sum = parallel::ordered_sum<double>(nblocks, [&](std::size_t b) {
      double s = 0.0;
      const std::uint64_t end = std::min(n, (b + 1) * kBlock);
      for (std::uint64_t j = b * kBlock + 1; j <= end; ++j) s += exact_mean_abs(schedule, j, k);
      return s;
    });
    return {sum * scale, 0.0, TermMode::Exact};
  }

  CTerm out;
  // Small j: E|P - 1| <= min(2, sqrt(E P^2 - 1)) with E P^2 = prod (1 + 4 gamma^2).
  const auto lo = static_cast<std::uint64_t>(std::ceil(std::exp2(p.epsilon * k)));
  double small = 0.0;
  for (std::uint64_t j = 1; j < lo; ++j) {
    const auto g = gammas(schedule, j, k);
    double second = 1.0;
    for (double v : g) second *= 1.0 + 4.0 * v * v;
    small += std::min(2.0, std::sqrt(std::max(0.0, second - 1.0)));
  }
  out.value = std::min(2.0 * std::exp2(-(1.0 - p.epsilon) * k), small * scale);

  // Geometric strata [points[s], points[s+1]); each weighted by its left endpoint, which
  // dominates the stratum when gamma is non-increasing.
  std::vector<std::uint64_t> points{lo};
  for (unsigned m = 0; m <= k; ++m) {
    const std::uint64_t v = std::uint64_t{1} << m;
    if (v > lo) points.push_back(v);
  }
  points.push_back(n + 1);

  const bool exact = k <= p.exact_cap;
  out.mode = exact ? TermMode::Bound : TermMode::MonteCarlo;
  double var = 0.0;
  for (std::size_t s = 0; s + 1 < points.size(); ++s) {
    const double weight = static_cast<double>(points[s + 1] - points[s]);
    const Estimate e = mean_abs_p_minus_one(schedule, points[s], k, p);
    out.value += weight * e.value * scale;
    var += (weight * e.stderr * scale) * (weight * e.stderr * scale);
  }
  out.stderr = std::sqrt(var);
  return out;
}

}  // namespace

ChenSteinReport chen_stein_terms(const BiasSchedule& schedule, const ChenSteinParams& params) {
  params.validate();
  const unsigned k = params.k;
  ChenSteinReport r;
  r.k = k;
  r.epsilon = params.epsilon;
  r.theta = params.theta;
  r.j0 = overlap_j0(schedule);
  r.A = a_term(k);

  if (k <= params.exact_cap) {
    r.B = exact_b_term(schedule, k);
    r.B_mode = TermMode::Exact;
  } else {
    const double scale = std::ldexp(1.0, -static_cast<int>(k));
    const double n = std::ldexp(1.0, static_cast<int>(k));
    // Every pair term is at most E[I_j] = 2^{-k}.
    double bound = (r.A * n * n - n) * scale;
    if (r.j0) {
      const double head = std::min(static_cast<double>(*r.j0), n);
      bound = std::min(bound, 2.0 * (k - 1) * (head * scale + std::exp2(-0.5 * k)));
    }
    r.B = bound;
    r.B_mode = TermMode::Bound;
  }

  const CTerm c = c_term(schedule, params);
  r.C = c.value;
  r.C_mode = c.mode;
  r.C_stderr = c.stderr;
  r.total = r.A + r.B + r.C;
  return r;
}

CountDistribution exact_annealed_pmf(const BiasSchedule& schedule, unsigned k) {
  if (k == 0) throw DomainError("k must be >= 1");
  if (k > 4) throw CapabilityError("exact_annealed_pmf enumerates 2^(2^k + k - 1) prefixes; k must be <= 4");
  const std::uint64_t nwords = std::uint64_t{1} << k;
  const unsigned length = static_cast<unsigned>(nwords) + k - 1;
  const auto g = gammas(schedule, 1, length);
  const std::uint64_t mask = nwords - 1;

  std::vector<std::uint32_t> counts(nwords, 0);
  std::vector<double> mass(nwords + 1, 0.0);
  std::vector<std::uint32_t> tally(nwords + 1, 0);

  // Depth-first over x_1..x_L carrying nu(prefix) and the window counts so far.
  std::function<void(unsigned, std::uint64_t, double)> descend = [&](unsigned n, std::uint64_t reg, double prob) {
    if (n == length) {
      std::fill(tally.begin(), tally.end(), 0);
      for (auto c : counts) ++tally[c];
      for (std::uint64_t m = 0; m <= nwords; ++m) {
        if (tally[m]) mass[m] += prob * static_cast<double>(tally[m]);
      }
      return;
    }
    for (int b = 0; b < 2; ++b) {
      const double p = b ? 0.5 + g[n] : 0.5 - g[n];
      const std::uint64_t next = (reg >> 1) | (std::uint64_t(b) << (k - 1));
      const bool full = n + 1 >= k;
      if (full) ++counts[next & mask];
      descend(n + 1, next, prob * p);
      if (full) --counts[next & mask];
    }
  };
  descend(0, 0, 1.0);

  CountDistribution d;
  d.label = "exact-annealed";
  for (std::uint64_t m = 0; m <= nwords; ++m) {
    if (mass[m] > 0.0) d.pmf[m] = mass[m] / static_cast<double>(nwords);
  }
  return d;
}

void BalancedSpec::validate() const {
  if (plus.size() != minus.size()) throw DomainError("D_+ and D_- must have equal size");
  std::vector<bool> seen(k + 1, false);
  for (const auto* set : {&plus, &minus}) {
    for (unsigned i : *set) {
      if (i == 0 || i > k) throw DomainError("balanced index outside [1, k]");
      if (seen[i]) throw DomainError("D_+ and D_- must be disjoint sets");
      seen[i] = true;
    }
  }
}

double xi_balanced(const BiasSchedule& schedule, std::uint64_t j, const BalancedSpec& spec) {
  spec.validate();
  if (j == 0) throw DomainError("xi_balanced: j must be >= 1");
  double xi = 1.0;
  for (unsigned i : spec.plus) xi *= 1.0 + schedule.gamma(i + j - 1);
  for (unsigned i : spec.minus) xi *= 1.0 - schedule.gamma(i + j - 1);
  return xi;
}

BalancedCheck check_balanced_products(const BiasSchedule& schedule, unsigned k, double epsilon, std::size_t samples,
                                      std::uint64_t seed) {
  if (k == 0 || k > 64) throw DomainError("k must lie in [1, 64]");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  const double lo = std::ceil(std::exp2(epsilon * k));
  // Keep j + k - 1 representable; 2^64 - 4096 is exact in double.
  const double hi = std::min(std::exp2(static_cast<double>(k)), std::ldexp(1.0, 64) - 4096.0);
  BalancedCheck out;
  out.k = k;
  out.samples = samples;
  const CounterRng root(seed);
  std::vector<unsigned> order(k);
  for (std::size_t s = 0; s < samples; ++s) {
    const CounterRng rng = root.split(s);
    const double u = rng.uniform(0);
    const auto j = static_cast<std::uint64_t>(std::clamp(std::floor(lo * std::pow(hi / lo, u)), lo, hi));
    BalancedSpec spec;
    spec.k = k;
    const unsigned ell = static_cast<unsigned>(rng.at(1) % (k / 2 + 1));
    std::iota(order.begin(), order.end(), 1U);
    for (unsigned i = k - 1; i > 0; --i) std::swap(order[i], order[rng.at(2 + i) % (i + 1)]);
    spec.plus.assign(order.begin(), order.begin() + ell);
    spec.minus.assign(order.begin() + ell, order.begin() + 2 * ell);
    const double xi = xi_balanced(schedule, j, spec);
    if (xi > 1.0) ++out.violations;
    if (xi > out.max_xi || s == 0) {
      out.max_xi = xi;
      out.worst_j = j;
    }
  }
  return out;
}

std::optional<unsigned> empirical_k0(std::span<const BalancedCheck> checks) {
  std::optional<unsigned> k0;
  for (auto it = checks.rbegin(); it != checks.rend(); ++it) {
    if (it->violations != 0) break;
    k0 = it->k;
  }
  return k0;
}

TailMeasure tail_set_measure(std::uint64_t k, double eta) {
  if (k == 0) throw DomainError("tail_set_measure: k must be >= 1");
  if (!(eta > 0.0)) throw DomainError("tail_set_measure: eta must be > 0");
  TailMeasure r;
  r.normal = normal_cdf(-eta);
  // sum_i w_i = 2 N_+ - k < -eta sqrt(k)  <=>  N_+ < (k - eta sqrt(k)) / 2
  const double limit = (static_cast<double>(k) - eta * std::sqrt(static_cast<double>(k))) / 2.0;
  if (limit <= 0.0) return r;
  const auto top = static_cast<std::uint64_t>(std::ceil(limit)) - 1;
  const double kd = static_cast<double>(k);
  const double base = std::lgamma(kd + 1.0) - kd * std::log(2.0);
  double sum = 0.0;
  for (std::uint64_t m = 0; m <= top && m <= k; ++m) {
    const double md = static_cast<double>(m);
    sum += std::exp(base - std::lgamma(md + 1.0) - std::lgamma(kd - md + 1.0));
  }
  r.exact = std::min(1.0, sum);
  return r;
}

bool in_tail_set(const Word& w, double eta) {
  return static_cast<double>(w.symbol_sum()) < -eta * std::sqrt(static_cast<double>(w.k));
}

double union_bound_hit_prob(const BiasSchedule& schedule, unsigned k, const Word& w) {
  if (k != w.k) throw DomainError("union_bound_hit_prob: word length differs from k");
  if (k == 0) throw DomainError("k must be >= 1");
  if (k > 30) throw CapabilityError("union_bound_hit_prob: k must be <= 30");
  const std::uint64_t n = std::uint64_t{1} << k;
  constexpr std::uint64_t kBlock = 4096;
  const auto nblocks = static_cast<std::size_t>((n + kBlock - 1) / kBlock);
  std::vector<double> sign(k);
  for (unsigned i = 0; i < k; ++i) sign[i] = 2.0 * w.symbol(i + 1);
  const double sum = parallel::ordered_sum<double>(nblocks, [&](std::size_t b) {
    const std::uint64_t first = std::uint64_t{b} * kBlock + 1;
    const std::uint64_t last = std::min(n, first + kBlock - 1);
    const auto g = gammas(schedule, first, static_cast<std::size_t>(last - first + k));
    double s = 0.0;
    for (std::uint64_t j = first; j <= last; ++j) {
      const double* gj = g.data() + (j - first);
      double p = 1.0;
      for (unsigned i = 0; i < k && p >= 1e-300; ++i) p *= 1.0 + sign[i] * gj[i];
      if (p >= 1e-300) s += p;
    }
    return s;
  });
  return std::ldexp(sum, -static_cast<int>(k));
}

}  // namespace pgl
