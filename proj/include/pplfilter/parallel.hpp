#pragma once

// Thin helpers around OpenMP so callers never touch omp.h directly.

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pplfilter {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline int thread_num() {
#ifdef _OPENMP
  return omp_get_thread_num();
#else
  return 0;
#endif
}

// Worker count to use for a request of `requested` threads; 0 means "all".
inline int resolve_threads(int requested) {
  return requested > 0 ? requested : max_threads();
}

}  // namespace pplfilter
