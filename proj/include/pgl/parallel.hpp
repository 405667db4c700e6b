#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pgl::parallel {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

inline bool in_parallel() {
#ifdef _OPENMP
  return omp_in_parallel() != 0;
#else
  return false;
#endif
}

/// Runs fn(b) for every b in [0, nblocks). Nested calls run serially on the calling thread.
/// fn must not throw.
template <class Fn>
void for_blocks(std::size_t nblocks, Fn&& fn) {
  const auto n = static_cast<std::int64_t>(nblocks);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) if (n > 1 && !omp_in_parallel())
#endif
  for (std::int64_t b = 0; b < n; ++b) fn(static_cast<std::size_t>(b));
}

/// Sum of fn(b) over blocks, added in block order. The block decomposition is chosen by
/// the caller, so the result does not depend on the thread count.
template <class T, class Fn>
T ordered_sum(std::size_t nblocks, Fn&& fn, T zero = T{}) {
  std::vector<T> partial(nblocks, zero);
  for_blocks(nblocks, [&](std::size_t b) { partial[b] = fn(b); });
  T total = zero;
  for (const T& p : partial) total += p;
  return total;
}

}  // namespace pgl::parallel
