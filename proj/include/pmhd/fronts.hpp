#pragma once

#include <cmath>

#include "pmhd/diff.hpp"
#include "pmhd/errors.hpp"
#include "pmhd/grid.hpp"

namespace pmhd {

struct FrontValue {
    double e;
    double e_prime;
    double e_double_prime;
};

/// Gaussian front bridging a wall mismatch of size `amplitude` to the far
/// field: e(z) = (A/sqrt(pi)) int_0^z exp(-t^2/4) dt, the closed-form solution
/// of e'' + (z/2) e' = 0 with e(0)=0, e(inf)=A. Evaluated through
/// e = A*erf(z/2); the identity is cross-checked against quadrature in the
/// test suite before anything relies on it.
struct Front {
    double amplitude = 0.0;

    explicit Front(double a) : amplitude(a) {
        if (a < 0.0) throw PreconditionError("Front: amplitude must be >= 0");
    }

    FrontValue operator()(double z) const { return eval(z); }

    FrontValue eval(double z) const {
        if (z < 0.0) throw PreconditionError("Front: z must be >= 0");
        FrontValue v;
        v.e = amplitude * std::erf(0.5 * z);
        v.e_prime = amplitude / std::sqrt(M_PI) * std::exp(-0.25 * z * z);
        v.e_double_prime = -0.5 * z * v.e_prime;
        return v;
    }
};

inline FrontValue eval_front(double amplitude, double z) { return Front(amplitude).eval(z); }

/// Max interior residual of (d/dx - d^2/deta^2) e(eta/sqrt(x)) by finite
/// differences on the given grid; exactly zero in the continuum for a front.
inline double front_heat_residual(const Field2D& e_sampled) {
    Field2D ex = d_dx(e_sampled);
    Field2D eee = d2_dy2(e_sampled);
    double m = 0.0;
    for (std::size_t i = 1; i + 1 < e_sampled.nx(); ++i)
        for (std::size_t j = 1; j + 1 < e_sampled.ny(); ++j)
            m = std::max(m, std::abs(ex.at(i, j) - eee.at(i, j)));
    return m;
}

/// Sample e(eta/sqrt(x)) on an (x, eta) grid.
inline Field2D sample_front(const Front& fr, const Grid1D& xg, const Grid1D& etag) {
    Field2D f(xg, etag, Frame::eta);
    for (std::size_t i = 0; i < xg.size(); ++i) {
        double sx = std::sqrt(xg[i]);
        for (std::size_t j = 0; j < etag.size(); ++j)
            f.at(i, j) = fr.eval(etag[j] / sx).e;
    }
    return f;
}

}  // namespace pmhd
