#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sid {

// Execution policy for the kernels that have both a serial reference path and
// an OpenMP path. Both paths reduce in a fixed order, so results are required
// to be bit-identical (enforced by tests).
enum class Exec { Serial, Parallel };

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

}  // namespace sid
