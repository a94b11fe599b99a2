#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pmhd/assemble.hpp"
#include "pmhd/quadrature.hpp"
#include "pmhd/ratefit.hpp"

using namespace pmhd;

namespace {

Hierarchy build_case(double delta, double sigma, double eps, double x_max, std::size_t ny) {
    SelfSimilarOptions so;
    so.delta = delta;
    so.sigma = sigma;
    auto ss = solve_selfsimilar(so);
    LeadingOptions lo;
    lo.delta = delta;
    lo.sigma = sigma;
    lo.x_max = x_max;
    lo.n_eta = 256;
    auto lead = solve_leading(ss, lo);
    HierarchyOptions ho;
    ho.eps = eps;
    ho.delta = delta;
    ho.sigma = sigma;
    ho.n = 2;
    ho.x_max = x_max;
    ho.ny = ny;
    ho.n_u = 2048;
    ho.nY_ideal = 48;
    return build_hierarchy(ss, lead, ho);
}

}  // namespace

TEST_CASE("zero expansion: constant outer flow is exact") {
    auto hy = build_case(0.0, 0.0, 1e-3, 10.0, 160);
    auto A = build_approximate(hy);
    for (std::size_t q = 0; q < A.u.v.size(); ++q) {
        CHECK(A.u.v[q] == 1.0);
        CHECK(A.v.v[q] == 0.0);
        CHECK(A.h.v[q] == 0.0);
        CHECK(A.g.v[q] == 0.0);
        CHECK(A.p.v[q] == 0.0);
    }
    auto Rop = compute_residuals(hy, ResidualRoute::operator_route);
    CHECK(Rop.R_u.max_abs() <= 1e-10);  // differencing the constant field leaves roundoff
    CHECK(Rop.R_h.max_abs() == 0.0);
    CHECK(Rop.R_g.max_abs() == 0.0);
    auto Rf = compute_residuals(hy, ResidualRoute::formula);
    CHECK(Rf.R_u.max_abs() == 0.0);

    auto rows = verify_summary(hy);
    for (auto& r : rows) CHECK(r.pass);
}

TEST_CASE("wall traces of the assembled solution") {
    auto hy = build_case(0.05, 0.05, 1e-3, 20.0, 224);
    auto A = build_approximate(hy);
    const double eps = hy.opt.eps;
    for (std::size_t k = 0; k < hy.nsta(); ++k) {
        // u telescopes to 1 - delta through the corrector/layer trace ledger
        CHECK(std::abs(A.u.at(k, 0) - 0.95) < 1e-8);
        // h telescopes to 0
        CHECK(std::abs(A.h.at(k, 0)) < 1e-6);
        // v telescopes to 0 exactly up to trace interpolation
        CHECK(std::abs(A.v.at(k, 0)) < 1e-8);
        // g carries the insulating-wall flux drift at order eps^0 (sigma > 0):
        // (g_p^0 + sigma v_e^1)(x,0) = K(x) != 0
        double K = hy.g0.at(k, 0) + hy.ideal_g[0].ve.at(k, 0) * hy.opt.sigma;
        CHECK(A.g.at(k, 0) ==
              doctest::Approx(K + std::sqrt(eps) * (hy.layer[0].g.at(k, 0) +
                                                    hy.opt.sigma * hy.ideal_g[1].ve.at(k, 0)))
                  .epsilon(1e-6));
    }
    // divergence of the assembled velocity pair stays small in the interior
    Field2D ux = d_dx(A.u), vy = d_dy(A.v);
    double m = 0.0;
    for (std::size_t k = 1; k + 1 < hy.nsta(); ++k) {
        if (hy.xs[k] < 4.0) continue;
        for (std::size_t j = 1; j + 1 < hy.ys.size(); ++j)
            m = std::max(m, std::abs(ux.at(k, j) + vy.at(k, j)));
    }
    CHECK(m < 2e-3);
}

TEST_CASE("residual routes agree within the discretization estimate") {
    auto hy = build_case(0.05, 0.05, 1e-3, 20.0, 224);
    auto Rf = compute_residuals(hy, ResidualRoute::formula);
    auto Rop = compute_residuals(hy, ResidualRoute::operator_route);
    Field2D est = residual_discretization_estimate(hy);
    std::size_t bad = 0, total = 0;
    for (std::size_t k = 0; k < hy.nsta(); ++k) {
        if (hy.xs[k] < 2.0) continue;
        double du = 0.0, dh = 0.0, e = 0.0;
        for (std::size_t j = 0; j < hy.ys.size(); ++j) {
            du = std::max(du, std::abs(Rf.R_u.at(k, j) - Rop.R_u.at(k, j)));
            dh = std::max(dh, std::abs(Rf.R_h.at(k, j) - Rop.R_h.at(k, j)));
            e = std::max(e, est.at(k, j));
        }
        ++total;
        if (du > std::max(1e-6, 5.0 * e)) ++bad;
        if (dh > std::max(1e-6, 5.0 * e)) ++bad;
    }
    CHECK(total > 0);
    CHECK(bad == 0);
}

TEST_CASE("formula-route residual decay (AC6 shape)") {
    auto hy = build_case(0.05, 0.05, 1e-3, 50.0, 288);
    auto Rf = compute_residuals(hy, ResidualRoute::formula);
    const double en = std::pow(hy.opt.eps, 0.5 * hy.opt.n);
    std::vector<double> l2(hy.nsta());
    for (std::size_t k = 0; k < hy.nsta(); ++k)
        l2[k] = l2_norm_grid(hy.ys, std::span<const double>(Rf.R_u.row(k), hy.ys.size())) / en;
    // cut-off support complete up to x_max/2; the measured decay is at least
    // as fast as the claimed envelope (the saturating term carries the tiny
    // sigma_n prefactor and is invisible at this scale, see the acceptance
    // suite for the literal box)
    auto fit = fit_decay_rate(hy.xs.nodes, l2, 5.0, 25.0);
    double sn = sigma_schedule(2, 2);
    CHECK(fit.exponent <= -1.25 + 2.0 * sn + 0.2);
    // absolute smallness: the scaled residual is O(eps^{1/4}) x^{-5/4} sized
    for (std::size_t k = 0; k < hy.nsta(); ++k)
        if (hy.xs[k] >= 5.0)
            CHECK(l2[k] <= 1.0 * std::pow(hy.opt.eps, 0.25) * std::pow(hy.xs[k], -1.25 + 2 * sn));
}
