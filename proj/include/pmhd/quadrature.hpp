#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "pmhd/errors.hpp"
#include "pmhd/grid.hpp"

namespace pmhd {

inline double trapezoid(std::span<const double> x, std::span<const double> f) {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        s += 0.5 * (f[i] + f[i - 1]) * (x[i] - x[i - 1]);
    return s;
}

/// Running integral F_j = int_{x_0}^{x_j} f.
inline std::vector<double> cumtrapz(std::span<const double> x, std::span<const double> f) {
    std::vector<double> F(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); ++i)
        F[i] = F[i - 1] + 0.5 * (f[i] + f[i - 1]) * (x[i] - x[i - 1]);
    return F;
}

/// int_{x_j}^{x_max} f, tail beyond x_max taken as zero. The last sample must
/// have decayed below tail_tol.
inline double integrate_tail(const Grid1D& g, std::span<const double> f,
                             std::size_t from_index, double tail_tol = 1e-8) {
    if (f.size() != g.size()) throw PreconditionError("integrate_tail: size mismatch");
    if (from_index >= g.size()) return 0.0;
    if (std::abs(f[g.size() - 1]) > tail_tol)
        throw TailTruncationError("integrate_tail: last sample above tail_tol", std::abs(f[g.size() - 1]));
    double s = 0.0;
    for (std::size_t i = from_index + 1; i < g.size(); ++i)
        s += 0.5 * (f[i] + f[i - 1]) * (g[i] - g[i - 1]);
    return s;
}

/// All tail integrals at once: T_j = int_{y_j}^{y_max} f.
inline std::vector<double> tail_integrals(const Grid1D& g, std::span<const double> f,
                                          double tail_tol = 1e-8) {
    if (std::abs(f[g.size() - 1]) > tail_tol)
        throw TailTruncationError("tail_integrals: last sample above tail_tol", std::abs(f[g.size() - 1]));
    std::vector<double> T(g.size(), 0.0);
    for (std::size_t i = g.size() - 1; i-- > 0;)
        T[i] = T[i + 1] + 0.5 * (f[i] + f[i + 1]) * (g[i + 1] - g[i]);
    return T;
}

/// Same but without the decay guard (for quantities that saturate, e.g. the
/// lower-limit vertical components of the final layer).
inline std::vector<double> cumtrapz_from_zero(const Grid1D& g, std::span<const double> f) {
    std::vector<double> F(g.size(), 0.0);
    for (std::size_t i = 1; i < g.size(); ++i)
        F[i] = F[i - 1] + 0.5 * (f[i] + f[i - 1]) * (g[i] - g[i - 1]);
    return F;
}

inline double l2_norm_grid(const Grid1D& g, std::span<const double> f) {
    double s = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        double a = f[i - 1] * f[i - 1], b = f[i] * f[i];
        s += 0.5 * (a + b) * (g[i] - g[i - 1]);
    }
    return std::sqrt(s);
}

inline double linf_norm(std::span<const double> f) {
    double m = 0.0;
    for (double x : f) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace pmhd
