#pragma once

#include <span>
#include <vector>

#include "pmhd/grid.hpp"

// Second-order finite differences on non-uniform grids: 3-point centered in
// the interior, 3-point one-sided at the ends.

namespace pmhd {

inline void deriv1_line(std::span<const double> x, std::span<const double> f,
                        std::span<double> out) {
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) {
            double h1 = x[1] - x[0], h2 = x[2] - x[1];
            out[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1] -
                     h1 / (h2 * (h1 + h2)) * f[2];
        } else if (i == n - 1) {
            double h1 = x[n - 1] - x[n - 2], h2 = x[n - 2] - x[n - 3];
            out[n - 1] = (2 * h1 + h2) / (h1 * (h1 + h2)) * f[n - 1] -
                         (h1 + h2) / (h1 * h2) * f[n - 2] + h1 / (h2 * (h1 + h2)) * f[n - 3];
        } else {
            double hm = x[i] - x[i - 1], hp = x[i + 1] - x[i];
            out[i] = (-hp / (hm * (hm + hp))) * f[i - 1] + ((hp - hm) / (hm * hp)) * f[i] +
                     (hm / (hp * (hm + hp))) * f[i + 1];
        }
    }
}

inline void deriv2_line(std::span<const double> x, std::span<const double> f,
                        std::span<double> out) {
    const std::size_t n = x.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double hm = x[i] - x[i - 1], hp = x[i + 1] - x[i];
        out[i] = 2.0 * (hm * f[i + 1] - (hm + hp) * f[i] + hp * f[i - 1]) / (hm * hp * (hm + hp));
    }
    out[0] = out[1];
    out[n - 1] = out[n - 2];
}

inline std::vector<double> deriv1(std::span<const double> x, std::span<const double> f) {
    std::vector<double> out(x.size());
    deriv1_line(x, f, out);
    return out;
}

inline std::vector<double> deriv2(std::span<const double> x, std::span<const double> f) {
    std::vector<double> out(x.size());
    deriv2_line(x, f, out);
    return out;
}

inline Field2D d_dy(const Field2D& f) {
    Field2D g(f.xs, f.ys, f.frame);
    std::vector<double> tmp(f.ny());
    for (std::size_t i = 0; i < f.nx(); ++i) {
        deriv1_line(f.ys.nodes, std::span<const double>(f.row(i), f.ny()),
                    std::span<double>(g.row(i), g.ny()));
    }
    return g;
}

inline Field2D d2_dy2(const Field2D& f) {
    Field2D g(f.xs, f.ys, f.frame);
    for (std::size_t i = 0; i < f.nx(); ++i)
        deriv2_line(f.ys.nodes, std::span<const double>(f.row(i), f.ny()),
                    std::span<double>(g.row(i), g.ny()));
    return g;
}

inline Field2D d_dx(const Field2D& f) {
    Field2D g(f.xs, f.ys, f.frame);
    const std::size_t nx = f.nx(), ny = f.ny();
    std::vector<double> col(nx), dcol(nx);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) col[i] = f.at(i, j);
        deriv1_line(f.xs.nodes, col, std::span<double>(dcol));
        for (std::size_t i = 0; i < nx; ++i) g.at(i, j) = dcol[i];
    }
    return g;
}

inline Field2D d2_dx2(const Field2D& f) {
    Field2D g(f.xs, f.ys, f.frame);
    const std::size_t nx = f.nx(), ny = f.ny();
    std::vector<double> col(nx), dcol(nx);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) col[i] = f.at(i, j);
        deriv2_line(f.xs.nodes, col, std::span<double>(dcol));
        for (std::size_t i = 0; i < nx; ++i) g.at(i, j) = dcol[i];
    }
    return g;
}

}  // namespace pmhd
