#pragma once

#include <cstddef>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gelmine {

/// Number of threads a `workers` setting resolves to; <= 0 means all cores.
inline int resolve_workers(int workers) {
#ifdef _OPENMP
    return workers > 0 ? workers : omp_get_max_threads();
#else
    (void)workers;
    return 1;
#endif
}

/// Index-parallel loop over [0, n). Bodies must write results to per-index
/// slots only, so the outcome is independent of scheduling and worker count.
/// workers == 1 runs the plain serial loop; workers <= 0 uses all cores.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
#ifdef _OPENMP
    const int threads = resolve_workers(workers);
    if (threads > 1 && n > 1) {
        std::exception_ptr first_error = nullptr;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            try {
                fn(static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical(gelmine_parallel_for_error)
                if (!first_error) first_error = std::current_exception();
            }
        }
        if (first_error) std::rethrow_exception(first_error);
        return;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

} // namespace gelmine
