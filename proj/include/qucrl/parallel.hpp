#pragma once

#include <cstdlib>
#include <string>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace qucrl {

// Replica-level parallelism: Monte-Carlo trials and seeded experiment runs
// are independent, so they are dispatched with an OpenMP parallel-for. Each
// index must derive its own RngStream; results then do not depend on the
// schedule and the serial path is bit-identical to the parallel one.
//
// QUCRL_THREADS caps the worker count (0 or unset = OpenMP default).
inline int max_replica_threads() {
    if (const char* env = std::getenv("QUCRL_THREADS")) {
        const int k = std::atoi(env);
        if (k > 0) return k;
    }
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

enum class Exec { serial, parallel };

template <typename F>
void parallel_for(long n, Exec mode, F&& body) {
#if defined(_OPENMP)
    if (mode == Exec::parallel) {
        const int threads = max_replica_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
#else
    (void)mode;
#endif
    for (long i = 0; i < n; ++i) body(i);
}

inline std::string exec_name(Exec mode) {
    return mode == Exec::parallel ? "parallel" : "serial";
}

}  // namespace qucrl
