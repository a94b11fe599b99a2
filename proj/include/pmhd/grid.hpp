#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "pmhd/errors.hpp"

namespace pmhd {

enum class Frame { eta, y, Y, x, z };

inline const char* frame_name(Frame f) {
    switch (f) {
        case Frame::eta: return "eta";
        case Frame::y: return "y";
        case Frame::Y: return "Y";
        case Frame::x: return "x";
        case Frame::z: return "z";
    }
    return "?";
}

enum class GridKind { uniform, stretched };

struct Grid1D {
    std::vector<double> nodes;
    GridKind kind = GridKind::uniform;
    Frame frame = Frame::y;

    Grid1D() = default;
    Grid1D(std::vector<double> ns, GridKind k, Frame f)
        : nodes(std::move(ns)), kind(k), frame(f) {
        validate();
    }

    std::size_t size() const { return nodes.size(); }
    double operator[](std::size_t i) const { return nodes[i]; }
    double front() const { return nodes.front(); }
    double back() const { return nodes.back(); }

    void validate() const {
        if (nodes.size() < 4) throw PreconditionError("Grid1D: need at least 4 nodes");
        for (std::size_t i = 1; i < nodes.size(); ++i)
            if (!(nodes[i] > nodes[i - 1]))
                throw PreconditionError("Grid1D: nodes must be strictly increasing");
        const double start = (frame == Frame::x) ? 1.0 : 0.0;
        if (std::abs(nodes.front() - start) > 1e-14)
            throw PreconditionError(std::string("Grid1D: first node must be ") +
                                    (frame == Frame::x ? "1" : "0"));
    }
};

inline Grid1D uniform_grid(double a, double b, std::size_t n, Frame f) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = a + (b - a) * double(i) / double(n - 1);
    v.front() = a;
    v.back() = b;
    return Grid1D(std::move(v), GridKind::uniform, f);
}

/// Algebraically stretched wall-normal grid, y_j = y_max*sinh(a*s_j)/sinh(a).
/// Clusters nodes near the wall; a = 3 by default.
inline Grid1D sinh_grid(double y_max, std::size_t n, Frame f, double a = 3.0) {
    std::vector<double> v(n);
    const double denom = std::sinh(a);
    for (std::size_t i = 0; i < n; ++i) {
        double s = double(i) / double(n - 1);
        v[i] = y_max * std::sinh(a * s) / denom;
    }
    v.front() = 0.0;
    v.back() = y_max;
    return Grid1D(std::move(v), GridKind::stretched, f);
}

/// Streamwise stations x_0 = 1 with geometrically growing step, capped.
inline Grid1D station_grid(double x_max, double dx0, double ratio, double dx_cap) {
    std::vector<double> v;
    v.push_back(1.0);
    double dx = dx0;
    while (v.back() < x_max) {
        double x = v.back() + dx;
        if (x > x_max - 0.25 * dx) x = x_max;
        v.push_back(x);
        dx = std::min(dx * ratio, dx_cap);
    }
    return Grid1D(std::move(v), GridKind::stretched, Frame::x);
}

struct Field2D {
    Grid1D xs;  // streamwise stations
    Grid1D ys;  // wall-normal nodes
    std::vector<double> v;  // station-major: v[i*ny + j]
    Frame frame = Frame::y;

    Field2D() = default;
    Field2D(Grid1D xg, Grid1D yg, Frame f = Frame::y)
        : xs(std::move(xg)), ys(std::move(yg)), frame(f) {
        v.assign(xs.size() * ys.size(), 0.0);
    }

    std::size_t nx() const { return xs.size(); }
    std::size_t ny() const { return ys.size(); }
    double& at(std::size_t i, std::size_t j) { return v[i * ys.size() + j]; }
    double at(std::size_t i, std::size_t j) const { return v[i * ys.size() + j]; }
    const double* row(std::size_t i) const { return v.data() + i * ys.size(); }
    double* row(std::size_t i) { return v.data() + i * ys.size(); }

    std::vector<double> row_copy(std::size_t i) const {
        return std::vector<double>(row(i), row(i) + ys.size());
    }

    bool all_finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
};

}  // namespace pmhd
