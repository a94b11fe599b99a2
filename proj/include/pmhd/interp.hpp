#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "pmhd/errors.hpp"

namespace pmhd {

/// Monotone cubic (Fritsch-Carlson) interpolant. Shape-preserving, C^1,
/// O(h^3) on smooth data. Evaluation clamps to the end values outside the
/// knot range unless extrapolate_zero is set (then it returns 0 beyond the
/// last knot, which is how rapidly decaying layer profiles are extended).
class Pchip {
  public:
    Pchip() = default;
    Pchip(std::span<const double> x, std::span<const double> y, bool extrapolate_zero = false)
        : x_(x.begin(), x.end()), y_(y.begin(), y.end()), zero_beyond_(extrapolate_zero) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) throw PreconditionError("Pchip: need >=2 matching samples");
        d_.assign(n, 0.0);
        std::vector<double> h(n - 1), del(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            if (!(h[i] > 0)) throw PreconditionError("Pchip: x not increasing");
            del[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        if (n == 2) {
            d_[0] = d_[1] = del[0];
        } else {
            for (std::size_t i = 1; i + 1 < n; ++i) {
                if (del[i - 1] * del[i] <= 0.0) {
                    d_[i] = 0.0;
                } else {
                    double w1 = 2.0 * h[i] + h[i - 1];
                    double w2 = h[i] + 2.0 * h[i - 1];
                    d_[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
                }
            }
            d_[0] = edge_slope(h[0], h[1], del[0], del[1]);
            d_[n - 1] = edge_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
        }
    }

    double operator()(double t) const { return eval(t); }

    double eval(double t) const {
        if (t <= x_.front()) return (t < x_.front() && zero_beyond_) ? 0.0 : y_.front();
        if (t >= x_.back()) return (t > x_.back() && zero_beyond_) ? 0.0 : y_.back();
        std::size_t i = locate(t);
        double h = x_[i + 1] - x_[i], s = (t - x_[i]) / h;
        double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        double h10 = s * (1 - s) * (1 - s);
        double h01 = s * s * (3 - 2 * s);
        double h11 = s * s * (s - 1);
        return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
    }

    double deriv(double t) const {
        if (t <= x_.front()) return zero_beyond_ && t < x_.front() ? 0.0 : d_.front();
        if (t >= x_.back()) return zero_beyond_ && t > x_.back() ? 0.0 : d_.back();
        std::size_t i = locate(t);
        double h = x_[i + 1] - x_[i], s = (t - x_[i]) / h;
        double g00 = 6 * s * (s - 1) / h;
        double g10 = (3 * s - 1) * (s - 1);
        double g01 = -g00;
        double g11 = s * (3 * s - 2);
        return g00 * y_[i] + g10 * d_[i] + g01 * y_[i + 1] + g11 * d_[i + 1];
    }

    /// Inverse for strictly monotone increasing data; Newton with bisection
    /// safeguard per interval, so the round trip is exact to root-finder
    /// tolerance.
    double inverse(double yv) const {
        if (yv <= y_.front()) return x_.front();
        if (yv >= y_.back()) return x_.back();
        std::size_t lo = 0, hi = x_.size() - 1;
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            (y_[mid] <= yv ? lo : hi) = mid;
        }
        double a = x_[lo], b = x_[lo + 1];
        double t = a + (b - a) * (yv - y_[lo]) / (y_[lo + 1] - y_[lo]);
        for (int it = 0; it < 60; ++it) {
            double f = eval(t) - yv;
            if (std::abs(f) < 1e-14 * (1.0 + std::abs(yv))) break;
            (f > 0 ? b : a) = t;
            double df = deriv(t);
            double tn = (df != 0.0) ? t - f / df : 0.5 * (a + b);
            t = (tn > a && tn < b) ? tn : 0.5 * (a + b);
        }
        return t;
    }

    const std::vector<double>& knots() const { return x_; }

  private:
    static double edge_slope(double h0, double h1, double d0, double d1) {
        double d = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d * d0 <= 0) return 0.0;
        if (d0 * d1 < 0 && std::abs(d) > 3 * std::abs(d0)) return 3 * d0;
        return d;
    }

    std::size_t locate(double t) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), t);
        std::size_t i = static_cast<std::size_t>(it - x_.begin());
        if (i == 0) return 0;
        if (i >= x_.size()) return x_.size() - 2;
        return i - 1;
    }

    std::vector<double> x_, y_, d_;
    bool zero_beyond_ = false;
};

}  // namespace pmhd
