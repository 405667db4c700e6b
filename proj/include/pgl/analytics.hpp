#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pgl/distribution.hpp"
#include "pgl/sampler.hpp"
#include "pgl/schedule.hpp"

namespace pgl {

/// Largest k for which any function in this module enumerates all of {-1,+1}^k.
inline constexpr unsigned kMaxExactCap = 26;

struct ChenSteinParams {
  unsigned k = 8;
  /// Positions j < 2^{epsilon k} are bounded crudely instead of evaluated.
  double epsilon = 0.1;
  /// Exponent of the typical set A^theta_{k,j}.
  double theta = 0.25;
  std::uint64_t mc_samples = 4096;
  /// Largest k handled by exact word enumeration (per j) or exact pair sums.
  unsigned exact_cap = 20;
  /// Largest k for which C_k is summed exactly over every j (cost ~ k 4^k).
  unsigned full_c_cap = 12;
  std::uint64_t seed = 0x5EEDULL;

  /// Throws DomainError unless 0 < epsilon < 1, 0 < theta < 1/2, exact_cap <= 26, k >= 1.
  void validate() const;
};

enum class TermMode { Exact, Bound, MonteCarlo };
std::string_view to_string(TermMode mode);

/// Decomposition of the Chen-Stein bound d_TV(M_k, Po(1)) <= A_k + B_k + C_k.
struct ChenSteinReport {
  unsigned k = 0;
  double lambda = 1.0;
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  TermMode B_mode = TermMode::Exact;
  TermMode C_mode = TermMode::Exact;
  double C_stderr = 0.0;
  double total = 0.0;
  /// Smallest index past which 1 + 2|gamma_n| < 2^{1/4}; unset when none exists.
  std::optional<std::uint64_t> j0;
  double epsilon = 0.0;
  double theta = 0.0;
};

/// {k, lambda, A, B, B_mode, C, C_mode, C_stderr, total, j0, epsilon, theta}; j0 is null when unset.
void to_json(nlohmann::json& out, const ChenSteinReport& r);

/// P_{j,k}(w) = prod_{i=1}^{k} (1 + 2 w_i gamma_{i+j-1}). Falls back to log space if a
/// partial product leaves [1e-300, 1e300].
double p_jk(const BiasSchedule& schedule, std::uint64_t j, const Word& w);

/// P(I_j = 1 | W = w) = 2^{-k} P_{j,k}(w).
double conditional_hit_prob(const BiasSchedule& schedule, std::uint64_t j, const Word& w);

/// E_k[P_{j,k}] by Gray-code enumeration of all 2^k words. Throws CapabilityError for k > 26.
double mean_p_jk(const BiasSchedule& schedule, std::uint64_t j, unsigned k);

/// E_k[I_i I_j]. Disjoint windows (|i - j| >= k) use the closed form
/// 2^{-2k} prod_t (1 + 4 gamma_{t+i-1} gamma_{t+j-1}); overlapping windows enumerate the
/// 2^{|i-j|} periodic words and sum the probability of the juxtaposed word.
/// Throws CapabilityError for overlapping windows with k > exact_cap.
double pair_expectation(const BiasSchedule& schedule, std::uint64_t i, std::uint64_t j, unsigned k,
                        unsigned exact_cap = kMaxExactCap);

/// Same quantity for overlapping windows, without enumeration: the juxtaposed word is
/// periodic with period d = |i - j|, so its probability factorizes over residues mod d.
double pair_expectation_factorized(const BiasSchedule& schedule, std::uint64_t i, std::uint64_t j, unsigned k);

struct Estimate {
  double value = 0.0;
  double stderr = 0.0;
  TermMode mode = TermMode::Exact;
};

/// E_k|P_{j,k} - 1|: exact enumeration when k <= params.exact_cap, otherwise a Monte Carlo
/// mean over params.mc_samples uniform words.
Estimate mean_abs_p_minus_one(const BiasSchedule& schedule, std::uint64_t j, unsigned k, const ChenSteinParams& params);

struct ChebyshevMass {
  /// mu^k of the complement of A^theta_{k,j}.
  double mass = 0.0;
  /// (sum gamma^2)^{2 theta}
  double bound = 0.0;
  double variance = 0.0;
  double threshold = 0.0;
};

/// Exact mass of {w : |sum_i w_i gamma_{i+j-1}| > (sum_i gamma_{i+j-1}^2)^{1/2 - theta}}.
/// Ties at the threshold belong to A^theta_{k,j}. Throws CapabilityError for k > exact_cap.
ChebyshevMass chebyshev_set_mass(const BiasSchedule& schedule, std::uint64_t j, unsigned k, double theta,
                                 unsigned exact_cap = kMaxExactCap);

/// A_k = 2^{-2k} sum_j (1 + |Gamma_j^s|), from the closed count of neighbours.
double a_term(unsigned k);

/// j_0 of the pair-overlap estimate: smallest n with 1 + 2|gamma_m| < 2^{1/4} for all m >= n.
std::optional<std::uint64_t> overlap_j0(const BiasSchedule& schedule);

ChenSteinReport chen_stein_terms(const BiasSchedule& schedule, const ChenSteinParams& params);

/// Exact law of M_k under nu x mu^k by enumerating every prefix of length 2^k + k - 1.
/// Throws CapabilityError for k > 4.
CountDistribution exact_annealed_pmf(const BiasSchedule& schedule, unsigned k);

/// Equal-size disjoint index sets D_+, D_- inside [k] (1-based).
struct BalancedSpec {
  unsigned k = 0;
  std::vector<unsigned> plus;
  std::vector<unsigned> minus;

  /// Throws DomainError on unequal sizes, overlap, or indices outside [1, k].
  void validate() const;
};

/// Xi_j = prod_{i in D_+}(1 + gamma_{i+j-1}) prod_{i in D_-}(1 - gamma_{i+j-1}).
double xi_balanced(const BiasSchedule& schedule, std::uint64_t j, const BalancedSpec& spec);

struct BalancedCheck {
  unsigned k = 0;
  std::size_t samples = 0;
  std::size_t violations = 0;
  double max_xi = 0.0;
  std::uint64_t worst_j = 0;
};

/// Samples (j, D_+, D_-) with j log-uniform on [2^{epsilon k}, min(2^k, 2^64 - k)] and
/// |D_+| uniform on [0, k/2], counting Xi_j > 1.
BalancedCheck check_balanced_products(const BiasSchedule& schedule, unsigned k, double epsilon, std::size_t samples,
                                      std::uint64_t seed);

/// Smallest k in `checks` (sorted by k) past which no check has a violation; nullopt if the last one fails.
std::optional<unsigned> empirical_k0(std::span<const BalancedCheck> checks);

struct TailMeasure {
  /// mu^k{w : sum_i w_i < -eta sqrt(k)} from the binomial tail.
  double exact = 0.0;
  /// Phi(-eta)
  double normal = 0.0;
};

/// Throws DomainError unless k >= 1 and eta > 0.
TailMeasure tail_set_measure(std::uint64_t k, double eta);

/// Whether sum_i w_i < -eta sqrt(k).
bool in_tail_set(const Word& w, double eta);

/// 2^{-k} sum_{j=1}^{2^k} P_{j,k}(w), the union bound on nu{x : M_k(x, w) >= 1}.
/// Throws CapabilityError for k > 30.
double union_bound_hit_prob(const BiasSchedule& schedule, unsigned k, const Word& w);

}  // namespace pgl
