#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pmhd/selfsimilar.hpp"

using namespace pmhd;

TEST_CASE("linearized pair: zero forcing, manufactured solution, sigma=0 decoupling") {
    auto z = uniform_grid(0.0, 12.0, 601, Frame::z);
    std::vector<double> f0(z.size(), 0.0), phi, psi;
    solve_linearized_pair(z, 0.05, f0, f0, phi, psi);
    for (double v : phi) CHECK(v == 0.0);
    for (double v : psi) CHECK(v == 0.0);

    // manufactured: phi = z exp(-z^2), psi = 0, sigma = 0
    auto solve_mms = [&](std::size_t n) {
        auto zg = uniform_grid(0.0, 12.0, n, Frame::z);
        std::vector<double> f1(n), f2(n, 0.0), ph, ps;
        for (std::size_t j = 0; j < n; ++j) {
            double zz = zg[j];
            f1[j] = std::exp(-zz * zz) * (5.5 * zz - 3.0 * zz * zz * zz);
        }
        solve_linearized_pair(zg, 0.0, f1, f2, ph, ps);
        double err = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            err = std::max(err, std::abs(ph[j] - zg[j] * std::exp(-zg[j] * zg[j])));
        return err;
    };
    double e1 = solve_mms(301), e2 = solve_mms(601);
    CHECK(e1 < 1e-3);
    CHECK(e1 / e2 > 3.0);  // O(h^2)
    CHECK(e1 / e2 < 5.0);

    // sigma = 0 decouples: psi independent of f1
    std::vector<double> f1(z.size()), ph1, ps1, ph2, ps2;
    for (std::size_t j = 0; j < z.size(); ++j) f1[j] = std::sin(z[j]) * std::exp(-z[j]);
    std::vector<double> f2(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) f2[j] = std::cos(z[j]) * std::exp(-z[j]);
    solve_linearized_pair(z, 0.0, f1, f2, ph1, ps1);
    std::vector<double> f1b(z.size(), 0.0);
    solve_linearized_pair(z, 0.0, f1b, f2, ph2, ps2);
    for (std::size_t j = 0; j < z.size(); ++j) CHECK(ps1[j] == doctest::Approx(ps2[j]).epsilon(1e-14));
}

TEST_CASE("self-similar solve: zero data, convergence, residual") {
    SelfSimilarOptions opt;
    opt.delta = 0.0;
    opt.sigma = 0.0;
    auto p0 = solve_selfsimilar(opt);
    for (double v : p0.phi) CHECK(v == 0.0);
    for (double v : p0.psi) CHECK(v == 0.0);

    opt.delta = 0.05;
    opt.sigma = 0.05;
    auto p = solve_selfsimilar(opt);
    CHECK(p.nonlinear_residual <= 1e-7);
    CHECK(p.phi_star.front() == doctest::Approx(0.0));
    CHECK(p.phi_star.back() == doctest::Approx(0.05).epsilon(1e-8));
    CHECK(p.psi_star.back() == doctest::Approx(0.05).epsilon(1e-8));
    // geometric contraction after the first couple of iterates
    REQUIRE(p.iterate_diffs.size() >= 4);
    for (std::size_t k = 2; k + 1 < p.iterate_diffs.size(); ++k) {
        if (p.iterate_diffs[k] < 1e-13) break;  // at the floor
        CHECK(p.iterate_diffs[k + 1] / p.iterate_diffs[k] < 0.9);
    }
}

TEST_CASE("self-similar: sigma = 0 forces psi = 0") {
    SelfSimilarOptions opt;
    opt.delta = 0.05;
    opt.sigma = 0.0;
    auto p = solve_selfsimilar(opt);
    for (double v : p.psi) CHECK(std::abs(v) < 1e-10);
    CHECK(p.nonlinear_residual <= 1e-7);
}

TEST_CASE("self-similar: Hw2 shrinks with (delta, sigma) and weighted decay is grid-stable") {
    SelfSimilarOptions opt;
    double prev = 1e300;
    for (double d : {0.1, 0.05, 0.025}) {
        opt.delta = d;
        opt.sigma = d;
        auto p = solve_selfsimilar(opt);
        double t = p.hw2.total();
        CHECK(t < prev);
        prev = t;
    }

    // || z^m phi ||_{L2} finite and stable under z-refinement for m <= 4
    opt.delta = 0.05;
    opt.sigma = 0.05;
    auto pa = solve_selfsimilar(opt);
    opt.nz = 2401;
    auto pb = solve_selfsimilar(opt);
    for (int m = 0; m <= 4; ++m) {
        auto wnorm = [&](const SelfSimilarProfiles& p) {
            std::vector<double> w(p.z.size());
            for (std::size_t j = 0; j < p.z.size(); ++j)
                w[j] = std::pow(p.z[j], m) * p.phi[j];
            return l2_norm_grid(p.z, w);
        };
        double na = wnorm(pa), nb = wnorm(pb);
        CHECK(std::isfinite(na));
        if (na > 1e-12) CHECK(std::abs(na - nb) / na < 0.02);
    }

    // converged solution changes by O(h^2) under refinement
    double dmax = 0.0;
    for (std::size_t j = 0; j < pa.z.size(); ++j)
        dmax = std::max(dmax, std::abs(pa.phi[j] - pb.phi_i.eval(pa.z[j])));
    CHECK(dmax < 1e-6);
}

TEST_CASE("self-similar: large data raises divergence") {
    SelfSimilarOptions opt;
    opt.delta = 0.5;
    opt.sigma = 0.5;
    CHECK_THROWS(solve_selfsimilar(opt));
}
