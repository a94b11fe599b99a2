#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

// OpenMP kernels with a serial reference path. The switch selects the path at
// runtime so tests can compare both on identical inputs. Reductions always go
// through a per-index buffer summed in index order, which makes results
// independent of the thread count.

namespace pmhd::par {

bool enabled();
void set_enabled(bool on);
int max_threads();

template <class F>
inline void parallel_for(std::int64_t n, F&& f) {
#ifdef _OPENMP
    if (enabled()) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) f(i);
        return;
    }
#endif
    for (std::int64_t i = 0; i < n; ++i) f(i);
}

/// Deterministic sum of f(0..n-1): partials are computed (possibly in
/// parallel) into a buffer and accumulated in index order.
template <class F>
inline double sum_indexed(std::int64_t n, F&& f) {
    std::vector<double> part(static_cast<std::size_t>(n));
    parallel_for(n, [&](std::int64_t i) { part[static_cast<std::size_t>(i)] = f(i); });
    double s = 0.0;
    for (double v : part) s += v;
    return s;
}

template <class F>
inline double max_indexed(std::int64_t n, F&& f) {
    std::vector<double> part(static_cast<std::size_t>(n));
    parallel_for(n, [&](std::int64_t i) { part[static_cast<std::size_t>(i)] = f(i); });
    double m = part.empty() ? 0.0 : part[0];
    for (double v : part) m = v > m ? v : m;
    return m;
}

}  // namespace pmhd::par
