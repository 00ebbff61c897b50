#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hsurf {

/// Execution policy for the data-parallel kernels. Every kernel has a serial
/// reference path producing bit-identical results; tests compare the two.
enum class Exec { Serial, Parallel };

/// Runs body(i) for i in [0, n). The parallel path uses a static schedule so
/// each index is computed exactly once by one thread; results must be written
/// to per-index slots so the outcome does not depend on the thread count.
template <typename F>
void for_each_index(std::ptrdiff_t n, Exec exec, F&& body) {
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
  }
}

/// Pairwise tree reduction with a shape fixed by the element count alone, so
/// the sum is deterministic and independent of thread count or schedule.
/// Consumes the buffer.
template <typename T>
T pairwise_sum(std::vector<T>& terms) {
  if (terms.empty()) return T{};
  std::size_t n = terms.size();
  while (n > 1) {
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < half; ++i) terms[i] = terms[2 * i] + terms[2 * i + 1];
    if (n % 2 == 1) {
      terms[half] = terms[n - 1];
      n = half + 1;
    } else {
      n = half;
    }
  }
  return terms[0];
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_num_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace hsurf
