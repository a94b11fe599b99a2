#pragma once

#include <cmath>
#include <span>

#include "pmhd/errors.hpp"
#include "pmhd/grid.hpp"
#include "pmhd/quadrature.hpp"

namespace pmhd {

enum class HardyDirection { tail, head };

struct HardyResult {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// Quadrature check of the Hardy inequalities
///   tail: int ( (1/y) int_y^inf f )^p y^a  <=  (p/(a+1-p))^p int f^p y^a,  a > p-1
///   head: int ( (1/y) int_0^y f )^p y^a  <=  (p/(p-a-1))^p int f^p y^a,  a < p-1
/// for a sampled non-negative f.
inline HardyResult hardy_check(const Grid1D& g, std::span<const double> f, double p,
                               double alpha, HardyDirection dir) {
    if (f.size() != g.size()) throw PreconditionError("hardy_check: size mismatch");
    if (!(p > 1.0)) throw PreconditionError("hardy_check: requires p > 1");
    if (dir == HardyDirection::tail && !(alpha > p - 1.0))
        throw PreconditionError("hardy_check: tail direction requires alpha > p-1");
    if (dir == HardyDirection::head && !(alpha < p - 1.0))
        throw PreconditionError("hardy_check: head direction requires alpha < p-1");
    for (double v : f)
        if (v < 0.0) throw PreconditionError("hardy_check: f must be non-negative");

    const std::size_t n = g.size();
    std::vector<double> inner(n, 0.0);
    if (dir == HardyDirection::tail) {
        for (std::size_t i = n - 1; i-- > 0;)
            inner[i] = inner[i + 1] + 0.5 * (f[i] + f[i + 1]) * (g[i + 1] - g[i]);
    } else {
        for (std::size_t i = 1; i < n; ++i)
            inner[i] = inner[i - 1] + 0.5 * (f[i] + f[i - 1]) * (g[i] - g[i - 1]);
    }

    std::vector<double> glhs(n, 0.0), grhs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double y = g[i];
        if (y <= 0.0) {
            // y -> 0 limits: lhs integrand is inner^p y^{alpha-p} (tail) or
            // f(0)^p y^alpha (head); singular-but-integrable cases enter as 0.
            if (dir == HardyDirection::tail)
                glhs[i] = (alpha == p) ? std::pow(inner[i], p) : 0.0;
            else
                glhs[i] = (alpha == 0.0) ? std::pow(f[i], p) : 0.0;
            grhs[i] = (alpha == 0.0) ? std::pow(f[i], p) : 0.0;
            continue;
        }
        glhs[i] = std::pow(inner[i] / y, p) * std::pow(y, alpha);
        grhs[i] = std::pow(f[i], p) * std::pow(y, alpha);
    }
    HardyResult r;
    r.lhs = trapezoid(g.nodes, glhs);
    double c = (dir == HardyDirection::tail) ? p / (alpha + 1.0 - p) : p / (p - alpha - 1.0);
    r.rhs = std::pow(c, p) * trapezoid(g.nodes, grhs);
    r.holds = r.lhs <= r.rhs * (1.0 + 1e-6) + 1e-300;
    return r;
}

}  // namespace pmhd
