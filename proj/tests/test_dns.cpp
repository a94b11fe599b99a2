#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pmhd/dns.hpp"
#include "pmhd/quadrature.hpp"

using namespace pmhd;

namespace {

ApproxSolution uniform_approx(const Grid1D& xs, const Grid1D& ys) {
    ApproxSolution A;
    A.u = Field2D(xs, ys, Frame::y);
    A.v = A.u;
    A.h = A.u;
    A.g = A.u;
    A.p = A.u;
    for (auto& v : A.u.v) v = 1.0;
    return A;
}

}  // namespace

TEST_CASE("uniform flow is the exact steady state") {
    DnsOptions opt;
    opt.delta = 0.0;
    opt.sigma = 0.0;
    opt.eps = 2e-3;
    opt.x_max = 10.0;
    opt.nx = 96;
    opt.ny = 48;
    opt.y_max = 8.0;
    auto xs = uniform_grid(1.0, opt.x_max, opt.nx, Frame::x);
    auto ys = sinh_grid(opt.y_max, opt.ny, Frame::y, opt.stretch);
    auto A = uniform_approx(xs, ys);
    auto S = solve_dns(opt, A);
    CHECK(S.final_residual < 1e-10);
    CHECK(S.iterations <= 5);
    for (std::size_t q = 0; q < S.U.v.size(); ++q) {
        CHECK(std::abs(S.U.v[q] - 1.0) < 1e-12);
        CHECK(std::abs(S.H.v[q]) < 1e-12);
    }
    // remainder of a solution against itself vanishes
    auto R = remainder_fields(S, A, opt.eps, 2, 0.0);
    CHECK(R.u.max_abs() < 1e-9);
}

TEST_CASE("sigma = 0 keeps the magnetic field in the zero subspace") {
    DnsOptions opt;
    opt.delta = 0.05;
    opt.sigma = 0.0;
    opt.eps = 2e-3;
    opt.x_max = 5.0;
    opt.nx = 96;
    opt.ny = 64;
    opt.y_max = 8.0;
    opt.dns_tol = 1e-8;
    auto xs = uniform_grid(1.0, opt.x_max, opt.nx, Frame::x);
    auto ys = sinh_grid(opt.y_max, opt.ny, Frame::y, opt.stretch);
    // leading-layer-like initial guess with zero magnetic part
    ApproxSolution A = uniform_approx(xs, ys);
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ys.size(); ++j) {
            double z = ys[j] / std::sqrt(xs[i]);
            A.u.at(i, j) = 1.0 - opt.delta * std::erfc(0.5 * z);
        }
    auto S = solve_dns(opt, A);
    CHECK(S.final_residual < opt.dns_tol);
    double hmax = 0.0;
    for (std::size_t q = 0; q < S.H.v.size(); ++q)
        hmax = std::max({hmax, std::abs(S.H.v[q]), std::abs(S.G.v[q])});
    CHECK(hmax <= 1e-10);
}

TEST_CASE("manufactured solution recovered at second order") {
    const double a = 0.1, b = 0.05, delta = 0.05;
    auto run = [&](std::size_t nx, std::size_t ny) {
        DnsOptions opt;
        opt.delta = delta;
        opt.sigma = 0.05;
        opt.eps = 2e-3;
        opt.x_max = 3.0;
        opt.y_max = 2.0;
        opt.nx = nx;
        opt.ny = ny;
        opt.stretch = 1.0;
        opt.dns_tol = 1e-10;
        const double eps = opt.eps;
        MmsCase m;
        auto U_e = [=](double x, double y) { return (1 - delta) + a * std::sin(x) * std::sin(2 * y); };
        auto V_e = [=](double x, double y) { return -a * std::cos(x) * std::sin(y) * std::sin(y); };
        auto H_e = [=](double x, double y) { return b * std::cos(x) * std::sin(2 * y); };
        auto G_e = [=](double x, double y) { return b * std::sin(x) * std::sin(y) * std::sin(y); };
        m.U_e = U_e; m.V_e = V_e; m.H_e = H_e; m.G_e = G_e;
        m.psi_e = [=](double x, double y) {
            return (1 - delta) * y + a * std::sin(x) * std::sin(y) * std::sin(y);
        };
        m.A_e = [=](double x, double y) { return b * std::cos(x) * std::sin(y) * std::sin(y); };
        m.omega_e = [=](double x, double y) {
            return a * std::sin(x) * (2 * std::cos(2 * y) - eps * std::sin(y) * std::sin(y));
        };
        auto j_e = [=](double x, double y) {
            return b * std::cos(x) * (2 * std::cos(2 * y) - eps * std::sin(y) * std::sin(y));
        };
        m.S_omega = [=](double x, double y) {
            double sx = std::sin(x), cx = std::cos(x);
            double s2y = std::sin(2 * y), c2y = std::cos(2 * y), sy2 = std::sin(y) * std::sin(y);
            double om_x = a * cx * (2 * c2y - eps * sy2);
            double om_y = a * sx * (-4 * s2y - eps * s2y);
            double om_yy = a * sx * (-8 * c2y - 2 * eps * c2y);
            double om_xx = -a * sx * (2 * c2y - eps * sy2);
            double j_x = -b * sx * (2 * c2y - eps * sy2);
            double j_y = b * cx * (-4 * s2y - eps * s2y);
            return U_e(x, y) * om_x + V_e(x, y) * om_y - H_e(x, y) * j_x - G_e(x, y) * j_y -
                   (om_yy + eps * om_xx);
        };
        m.S_A = [=](double x, double y) {
            double A_x = -b * std::sin(x) * std::sin(y) * std::sin(y);
            double A_y = b * std::cos(x) * std::sin(2 * y);
            return U_e(x, y) * A_x + V_e(x, y) * A_y - j_e(x, y);
        };
        auto xs = uniform_grid(1.0, opt.x_max, nx, Frame::x);
        auto ys = sinh_grid(opt.y_max, ny, Frame::y, opt.stretch);
        // start from a perturbed state so the solver does real work
        ApproxSolution A0 = uniform_approx(xs, ys);
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = 0; j < ys.size(); ++j) {
                A0.u.at(i, j) = U_e(xs[i], ys[j]) * (1.0 + 0.05 * std::sin(3 * xs[i]));
                A0.h.at(i, j) = H_e(xs[i], ys[j]);
            }
        auto S = solve_dns(opt, A0, &m);
        double e2 = 0.0, cnt = 0.0;
        for (std::size_t i = 1; i + 1 < xs.size(); ++i)
            for (std::size_t j = 1; j + 1 < ys.size(); ++j) {
                double du = S.U.at(i, j) - U_e(xs[i], ys[j]);
                double dh = S.H.at(i, j) - H_e(xs[i], ys[j]);
                e2 += du * du + dh * dh;
                cnt += 1.0;
            }
        return std::sqrt(e2 / cnt);
    };
    double ea = run(48, 32), eb = run(96, 64);
    double rate = std::log2(ea / eb);
    CHECK(rate > 1.7);
    CHECK(rate < 2.3);
}
