#pragma once

// Serial reference versions of the parallel kernels. They take the straightforward route
// (one scalar gamma() call per position, direct products, no Gray-code reuse) and exist
// for cross-checking and benchmarking.

#include <cstdint>

#include "pgl/counter.hpp"
#include "pgl/sampler.hpp"
#include "pgl/schedule.hpp"

namespace pgl::reference {

PackedSequence sample_sequence(const BiasSchedule& schedule, std::uint64_t length, std::uint64_t seed);

/// Dense histogram from independent window extraction at every j. Requires k <= 26.
WindowHistogram window_histogram(const PackedSequence& x, unsigned k);

/// E_k|P_{j,k} - 1| with a fresh product for every word.
double mean_abs_p_minus_one(const BiasSchedule& schedule, std::uint64_t j, unsigned k);

/// 2^{-k} sum_j P_{j,k}(w) with scalar gamma() calls.
double union_bound_hit_prob(const BiasSchedule& schedule, unsigned k, const Word& w);

}  // namespace pgl::reference
