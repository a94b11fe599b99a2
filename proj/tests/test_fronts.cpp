#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pmhd/fronts.hpp"
#include "test_support.hpp"

using namespace pmhd;

TEST_CASE("front endpoint values and erf identity vs quadrature") {
    Front f(0.1);
    CHECK(f.eval(0.0).e == 0.0);
    CHECK(f.eval(40.0).e == doctest::Approx(0.1).epsilon(1e-12));

    // e(2) against the integral definition computed by quadrature
    double want = 0.1 / std::sqrt(M_PI) *
                  oracle::simpson([](double t) { return std::exp(-t * t / 4.0); }, 0.0, 2.0, 8192);
    CHECK(f.eval(2.0).e == doctest::Approx(want).epsilon(1e-12));
    CHECK(f.eval(2.0).e == doctest::Approx(0.0842701).epsilon(1e-5));

    // identity cross-check over a sweep of z
    for (double z = 0.0; z <= 12.0; z += 0.37) {
        double q = 0.1 / std::sqrt(M_PI) *
                   oracle::simpson([](double t) { return std::exp(-t * t / 4.0); }, 0.0, z, 8192);
        CHECK(std::abs(f.eval(z).e - q) < 1e-10);
    }
}

TEST_CASE("front ODE residual from closed forms") {
    Front f(0.07);
    double rmax = 0.0;
    for (double z = 0.0; z <= 14.0; z += 0.01) {
        auto v = f.eval(z);
        rmax = std::max(rmax, std::abs(v.e_double_prime + 0.5 * z * v.e_prime));
    }
    CHECK(rmax <= 1e-12);
}

TEST_CASE("front sup bound and weighted decay") {
    Front f(0.05);
    double m = 0.0;
    for (double z = 0.0; z <= 30.0; z += 0.01) m = std::max(m, std::abs(f.eval(z).e));
    CHECK(m <= 0.05 + 1e-14);

    double zmax = 12.0;
    for (int mexp = 0; mexp <= 6; ++mexp)
        CHECK(std::abs(std::pow(zmax, mexp) * (f.eval(zmax).e - 0.05)) < 1e-8);
}

TEST_CASE("front heat residual: O(h^2), zero for constants, Theta(1) for non-solutions") {
    Front f(0.1);
    auto resid_at = [&](std::size_t nx, std::size_t ne) {
        auto xg = uniform_grid(1.0, 2.0, nx, Frame::x);
        std::vector<double> en(ne);
        for (std::size_t j = 0; j < ne; ++j) en[j] = 4.0 * j / double(ne - 1);
        Grid1D eg(en, GridKind::uniform, Frame::eta);
        return front_heat_residual(sample_front(f, xg, eg));
    };
    double r1 = resid_at(41, 41);
    double r2 = resid_at(81, 81);
    CHECK(r1 / r2 > 2.8);  // ~4x per halving
    CHECK(r1 / r2 < 5.2);

    auto xg = uniform_grid(1.0, 2.0, 41, Frame::x);
    auto eg = uniform_grid(0.0, 4.0, 41, Frame::eta);
    Field2D cst(xg, eg, Frame::eta);
    for (auto& v : cst.v) v = 3.14;
    CHECK(front_heat_residual(cst) <= 1e-12);

    // e replaced by z: residual -z/(2x), not vanishing under refinement
    auto zfield = [&](std::size_t n) {
        auto xgn = uniform_grid(1.0, 2.0, n, Frame::x);
        auto egn = uniform_grid(0.0, 4.0, n, Frame::eta);
        Field2D zf(xgn, egn, Frame::eta);
        for (std::size_t i = 0; i < zf.nx(); ++i)
            for (std::size_t j = 0; j < zf.ny(); ++j)
                zf.at(i, j) = egn[j] / std::sqrt(xgn[i]);
        return front_heat_residual(zf);
    };
    CHECK(zfield(41) > 0.1);
    CHECK(zfield(81) > 0.1);
}
