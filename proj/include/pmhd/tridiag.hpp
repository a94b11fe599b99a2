#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "pmhd/errors.hpp"

namespace pmhd {

/// Thomas algorithm for a*x_{i-1} + d*x_i + u*x_{i+1} = b.
/// lower[0] and upper[n-1] are ignored. Throws on a vanishing pivot.
inline std::vector<double> solve_tridiagonal(const std::vector<double>& lower,
                                             const std::vector<double>& diag,
                                             const std::vector<double>& upper,
                                             const std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n)
        throw PreconditionError("solve_tridiagonal: length mismatch");
    if (n == 0) return {};
    std::vector<double> c(n), d(n), x(n);
    double piv = diag[0];
    if (std::abs(piv) < 1e-300) throw SingularSystemError("solve_tridiagonal: zero pivot at row 0");
    c[0] = upper[0] / piv;
    d[0] = rhs[0] / piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = diag[i] - lower[i] * c[i - 1];
        if (std::abs(piv) < 1e-300)
            throw SingularSystemError("solve_tridiagonal: zero pivot at row " + std::to_string(i));
        c[i] = upper[i] / piv;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / piv;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

/// 2x2 block. m[0]=a11 m[1]=a12 m[2]=a21 m[3]=a22.
using Block2 = std::array<double, 4>;
using Vec2 = std::array<double, 2>;

inline Block2 inv2(const Block2& m) {
    double det = m[0] * m[3] - m[1] * m[2];
    if (std::abs(det) < 1e-300) throw SingularSystemError("block solve: singular 2x2 pivot");
    double r = 1.0 / det;
    return {m[3] * r, -m[1] * r, -m[2] * r, m[0] * r};
}

inline Block2 mul2(const Block2& a, const Block2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

inline Vec2 mulv(const Block2& a, const Vec2& x) {
    return {a[0] * x[0] + a[1] * x[1], a[2] * x[0] + a[3] * x[1]};
}

/// Block-Thomas for coupled pairs (used by the self-similar ODE system and the
/// linear layer marches where (u,h) couple through the magnetic terms).
inline std::vector<Vec2> solve_block_tridiagonal(const std::vector<Block2>& lower,
                                                 const std::vector<Block2>& diag,
                                                 const std::vector<Block2>& upper,
                                                 const std::vector<Vec2>& rhs) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n)
        throw PreconditionError("solve_block_tridiagonal: length mismatch");
    std::vector<Block2> cp(n);
    std::vector<Vec2> dp(n), x(n);
    Block2 inv = inv2(diag[0]);
    cp[0] = mul2(inv, upper[0]);
    dp[0] = mulv(inv, rhs[0]);
    for (std::size_t i = 1; i < n; ++i) {
        Block2 denom = diag[i];
        const Block2 lc = mul2(lower[i], cp[i - 1]);
        for (int k = 0; k < 4; ++k) denom[k] -= lc[k];
        inv = inv2(denom);
        cp[i] = mul2(inv, upper[i]);
        Vec2 r = rhs[i];
        const Vec2 ld = mulv(lower[i], dp[i - 1]);
        r[0] -= ld[0];
        r[1] -= ld[1];
        dp[i] = mulv(inv, r);
    }
    x[n - 1] = dp[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        Vec2 cx = mulv(cp[i], x[i + 1]);
        x[i] = {dp[i][0] - cx[0], dp[i][1] - cx[1]};
    }
    return x;
}

}  // namespace pmhd
