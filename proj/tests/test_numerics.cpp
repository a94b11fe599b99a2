#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pmhd/diff.hpp"
#include "pmhd/grid.hpp"
#include "pmhd/hardy.hpp"
#include "pmhd/interp.hpp"
#include "pmhd/norms.hpp"
#include "pmhd/quadrature.hpp"
#include "pmhd/ratefit.hpp"
#include "pmhd/tridiag.hpp"
#include "test_support.hpp"

using namespace pmhd;

TEST_CASE("tridiagonal: identity") {
    std::vector<double> lo{0, 0, 0}, di{1, 1, 1}, up{0, 0, 0}, b{3, -2, 7};
    auto x = solve_tridiagonal(lo, di, up, b);
    CHECK(x[0] == doctest::Approx(3));
    CHECK(x[1] == doctest::Approx(-2));
    CHECK(x[2] == doctest::Approx(7));
}

TEST_CASE("tridiagonal: (-1,2,-1) against dense elimination") {
    std::vector<double> lo{0, -1, -1}, di{2, 2, 2}, up{-1, -1, 0}, b{1, 0, 1};
    auto x = solve_tridiagonal(lo, di, up, b);
    auto xd = oracle::dense_solve({{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}}, {1, 0, 1});
    for (int i = 0; i < 3; ++i) {
        CHECK(x[i] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(x[i] == doctest::Approx(xd[i]).epsilon(1e-12));
    }
}

TEST_CASE("tridiagonal: Dirichlet Laplacian reproduces a quadratic") {
    // -u'' = -2 with u = y^2 on [0,1]: second differences are exact on quadratics.
    const std::size_t n = 21;
    double h = 1.0 / (n - 1);
    std::vector<double> lo(n), di(n), up(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        double y = i * h;
        if (i == 0 || i == n - 1) {
            di[i] = 1;
            b[i] = y * y;
        } else {
            lo[i] = -1 / (h * h);
            di[i] = 2 / (h * h);
            up[i] = -1 / (h * h);
            b[i] = -2.0;
        }
    }
    auto x = solve_tridiagonal(lo, di, up, b);
    for (std::size_t i = 0; i < n; ++i) {
        double y = i * h;
        CHECK(std::abs(x[i] - y * y) < 1e-10);
    }
}

TEST_CASE("tridiagonal: random diagonally dominant systems vs dense oracle") {
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 25; ++rep) {
        std::size_t n = 4 + rng() % 61;
        std::vector<double> lo(n, 0), di(n), up(n, 0), b(n);
        std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) lo[i] = u(rng);
            if (i + 1 < n) up[i] = u(rng);
            di[i] = 3.0 + std::abs(u(rng));  // dominant
            b[i] = u(rng);
            if (i > 0) A[i][i - 1] = lo[i];
            A[i][i] = di[i];
            if (i + 1 < n) A[i][i + 1] = up[i];
        }
        auto x = solve_tridiagonal(lo, di, up, b);
        auto xd = oracle::dense_solve(A, b);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(x[i] - xd[i]) < 1e-10 * (1.0 + std::abs(xd[i])));
    }
}

TEST_CASE("tridiagonal: zero pivot reported") {
    std::vector<double> lo{0, 0, 0, 0}, di{0, 1, 1, 1}, up{0, 0, 0, 0}, b{1, 1, 1, 1};
    CHECK_THROWS_AS(solve_tridiagonal(lo, di, up, b), SingularSystemError);
}

TEST_CASE("integrate_tail") {
    auto g = uniform_grid(0.0, 40.0, 40001, Frame::y);
    std::vector<double> zero(g.size(), 0.0), expy(g.size()), gauss(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        expy[i] = std::exp(-g[i]);
        gauss[i] = g[i] * std::exp(-g[i] * g[i]);
    }
    CHECK(integrate_tail(g, zero, 0) == 0.0);
    std::size_t j1 = 1000;  // y = 1
    CHECK(integrate_tail(g, expy, j1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
    CHECK(integrate_tail(g, gauss, 0) == doctest::Approx(0.5).epsilon(1e-6));

    std::vector<double> bad(g.size(), 0.1);
    CHECK_THROWS_AS(integrate_tail(g, bad, 0), TailTruncationError);
    try {
        integrate_tail(g, bad, 0);
    } catch (const TailTruncationError& e) {
        CHECK(e.last_value == doctest::Approx(0.1));
    }
}

TEST_CASE("fit_decay_rate") {
    std::vector<double> xs, v1, v2, v3;
    for (int i = 0; i < 200; ++i) {
        double x = 1.0 + i * 0.5;
        xs.push_back(x);
        v1.push_back(std::pow(x, -1.5));
        v2.push_back(3.7);
        v3.push_back(std::pow(x, -0.75) * (1.0 + 0.01 * std::sin(std::log(x))));
    }
    auto f1 = fit_decay_rate(xs, v1);
    CHECK(std::abs(f1.exponent + 1.5) < 1e-12);
    CHECK(f1.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    auto f2 = fit_decay_rate(xs, v2);
    CHECK(std::abs(f2.exponent) < 1e-12);
    auto f3 = fit_decay_rate(xs, v3);
    CHECK(std::abs(f3.exponent + 0.75) < 0.02);

    // invariance under positive rescaling
    std::vector<double> v1s(v1);
    for (auto& v : v1s) v *= 17.0;
    auto f1s = fit_decay_rate(xs, v1s);
    CHECK(std::abs(f1s.exponent - f1.exponent) < 1e-12);

    std::vector<double> neg(xs.size(), -1.0);
    CHECK_THROWS(fit_decay_rate(xs, neg));
    std::vector<double> two_x{1.0, 2.0}, two_v{1.0, 1.0};
    CHECK_THROWS_AS(fit_decay_rate(two_x, two_v, 0.5, 3.0), InsufficientDataError);
}

TEST_CASE("hardy_check: closed form and property sweep") {
    auto g = uniform_grid(0.0, 40.0, 40001, Frame::y);
    std::vector<double> zero(g.size(), 0.0), expy(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) expy[i] = std::exp(-g[i]);

    auto rz = hardy_check(g, zero, 2.0, 2.0, HardyDirection::tail);
    CHECK(rz.lhs == 0.0);
    CHECK(rz.rhs == 0.0);
    CHECK(rz.holds);

    auto re = hardy_check(g, expy, 2.0, 2.0, HardyDirection::tail);
    CHECK(re.lhs == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(re.rhs == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(re.holds);

    CHECK_THROWS_AS(hardy_check(g, expy, 2.0, 0.5, HardyDirection::tail), PreconditionError);
    CHECK_THROWS_AS(hardy_check(g, expy, 2.0, 2.0, HardyDirection::head), PreconditionError);

    std::mt19937 rng(42);
    auto gh = uniform_grid(0.0, 30.0, 12001, Frame::y);
    for (int rep = 0; rep < 100; ++rep) {
        oracle::RandomProfile f(rng);
        std::vector<double> fv(gh.size());
        for (std::size_t i = 0; i < gh.size(); ++i) fv[i] = f(gh[i]);
        CHECK(hardy_check(gh, fv, 2.0, 3.0, HardyDirection::tail).holds);
    }
}

TEST_CASE("eval_norm: zero fields, weighted quadrature, homogeneity") {
    auto zg = uniform_grid(0.0, 10.0, 2001, Frame::z);
    std::vector<double> zero(zg.size(), 0.0), f(zg.size());
    auto repz = hw2_norm(zg, zero, zero);
    for (auto& [k, v] : repz.components) CHECK(v == 0.0);

    // ||(1+z) e^{-z^2}||_{L2}^2 against a high-resolution quadrature oracle
    for (std::size_t i = 0; i < zg.size(); ++i) f[i] = std::exp(-zg[i] * zg[i]);
    auto rep = hw2_norm(zg, f, zero);
    double got = 0.0;
    for (auto& [k, v] : rep.components)
        if (k == "phi_w") got = v * v;
    double want = oracle::simpson(
        [](double z) { return (1 + z) * (1 + z) * std::exp(-2 * z * z); }, 0.0, 10.0, 20000);
    CHECK(got == doctest::Approx(want).epsilon(1e-4));

    // Q(sigma0) of the zero pair is zero; homogeneity on a nonzero pair
    auto xg = station_grid(20.0, 0.05, 1.1, 0.5);
    auto yg = sinh_grid(10.0, 48, Frame::eta);
    Field2D w(xg, yg, Frame::eta), om(xg, yg, Frame::eta);
    auto repq0 = q_norm(w, om, 0.2);
    CHECK(repq0.total() == 0.0);
    for (std::size_t i = 0; i < w.nx(); ++i)
        for (std::size_t j = 0; j < w.ny(); ++j) {
            w.at(i, j) = std::exp(-yg[j]) / xg[i];
            om.at(i, j) = yg[j] * std::exp(-yg[j]) / (1 + xg[i]);
        }
    auto rep1 = q_norm(w, om, 0.2);
    Field2D w3 = w, om3 = om;
    for (auto& v : w3.v) v *= -3.0;
    for (auto& v : om3.v) v *= -3.0;
    auto rep3 = q_norm(w3, om3, 0.2);
    for (std::size_t c = 0; c < rep1.components.size(); ++c)
        CHECK(rep3.components[c].second ==
              doctest::Approx(3.0 * rep1.components[c].second).epsilon(1e-12));
    CHECK(rep3.total() == doctest::Approx(3.0 * rep1.total()).epsilon(1e-12));
}

TEST_CASE("pchip: monotone interpolation and exact round trip") {
    std::vector<double> x, y;
    for (int i = 0; i <= 30; ++i) {
        double t = i / 30.0 * 3.0;
        x.push_back(t);
        y.push_back(t + 0.2 * std::sin(t));  // strictly increasing
    }
    Pchip p(x, y);
    for (double t : {0.13, 0.77, 1.9, 2.83}) {
        double yv = p.eval(t);
        CHECK(std::abs(p.inverse(yv) - t) < 1e-10);
    }
    // interpolation error O(h^3) on smooth data
    double err = 0.0;
    for (double t = 0.0; t <= 3.0; t += 0.003)
        err = std::max(err, std::abs(p.eval(t) - (t + 0.2 * std::sin(t))));
    CHECK(err < 2e-4);
}

TEST_CASE("derivatives: second order on smooth data") {
    auto g = sinh_grid(5.0, 60, Frame::y);
    std::vector<double> f(g.size()), d1e(g.size()), d2e(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        f[i] = std::sin(g[i]);
        d1e[i] = std::cos(g[i]);
        d2e[i] = -std::sin(g[i]);
    }
    auto d1 = deriv1(g.nodes, f);
    auto d2 = deriv2(g.nodes, f);
    double e1 = 0, e2 = 0;
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        e1 = std::max(e1, std::abs(d1[i] - d1e[i]));
        e2 = std::max(e2, std::abs(d2[i] - d2e[i]));
    }
    CHECK(e1 < 1e-2);
    CHECK(e2 < 5e-2);
}

TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 3, Frame::y), PreconditionError);
    std::vector<double> bad{0.0, 1.0, 0.5, 2.0};
    CHECK_THROWS_AS(Grid1D(bad, GridKind::uniform, Frame::y), PreconditionError);
    std::vector<double> not_at_one{0.0, 1.0, 2.0, 3.0};
    CHECK_THROWS_AS(Grid1D(not_at_one, GridKind::uniform, Frame::x), PreconditionError);
}
