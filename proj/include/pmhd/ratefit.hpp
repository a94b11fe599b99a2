#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "pmhd/errors.hpp"

namespace pmhd {

/// Fitted power-law exponent: the verdict carrier for every decay claim.
struct RateFit {
    double exponent = 0.0;
    double intercept = 0.0;  // log-log intercept: log(v) = intercept + exponent*log(x)
    double r_squared = 0.0;
    double x_lo = 0.0, x_hi = 0.0;

    double amplitude() const { return std::exp(intercept); }
};

/// Least-squares slope of log(vals) vs log(xs) inside [x_lo, x_hi].
inline RateFit fit_decay_rate(std::span<const double> xs, std::span<const double> vals,
                              double x_lo, double x_hi) {
    if (xs.size() != vals.size()) throw PreconditionError("fit_decay_rate: size mismatch");
    if (!(x_lo < x_hi)) throw PreconditionError("fit_decay_rate: window requires x_lo < x_hi");
    std::vector<double> lx, lv;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] < x_lo || xs[i] > x_hi) continue;
        if (!(vals[i] > 0.0))
            throw Error("fit_decay_rate: nonpositive value inside window");
        lx.push_back(std::log(xs[i]));
        lv.push_back(std::log(vals[i]));
    }
    const std::size_t n = lx.size();
    if (n < 3) throw InsufficientDataError("fit_decay_rate: fewer than 3 points in window");
    double mx = 0, mv = 0;
    for (std::size_t i = 0; i < n; ++i) { mx += lx[i]; mv += lv[i]; }
    mx /= double(n);
    mv /= double(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = lx[i] - mx, dy = lv[i] - mv;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    RateFit fit;
    fit.exponent = sxy / sxx;
    fit.intercept = mv - fit.exponent * mx;
    fit.r_squared = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    fit.x_lo = x_lo;
    fit.x_hi = x_hi;
    return fit;
}

/// Default window [x_max/10, x_max]: skips the transient near x = 1.
inline RateFit fit_decay_rate(std::span<const double> xs, std::span<const double> vals) {
    double x_hi = xs.back();
    return fit_decay_rate(xs, vals, x_hi / 10.0, x_hi);
}

}  // namespace pmhd
