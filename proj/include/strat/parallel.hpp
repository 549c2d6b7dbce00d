#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace strat {

// Execution policy for the batch kernels. Serial is the reference path;
// Parallel distributes iterations with OpenMP. Both must produce identical
// results: every iteration writes only to its own slot and draws randomness
// from its own counter-based stream.
enum class Exec { Serial, Parallel };

inline bool openmp_enabled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

template <typename F>
void for_each_index(Exec exec, int n, F&& f) {
    if (exec == Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) f(i);
        return;
#endif
    }
    for (int i = 0; i < n; ++i) f(i);
}

}  // namespace strat
