#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pmhd/layers.hpp"
#include "pmhd/quadrature.hpp"
#include "pmhd/ratefit.hpp"

using namespace pmhd;

namespace {

struct Built {
    SelfSimilarProfiles ss;
    LeadingLayer lead;
    Hierarchy hy;
};

Built build_small(double delta, double sigma, double eps, double x_max, std::size_t ny,
                  int n = 2) {
    SelfSimilarOptions so;
    so.delta = delta;
    so.sigma = sigma;
    auto ss = solve_selfsimilar(so);
    LeadingOptions lo;
    lo.delta = delta;
    lo.sigma = sigma;
    lo.x_max = x_max;
    lo.n_eta = 224;
    auto lead = solve_leading(ss, lo);
    HierarchyOptions ho;
    ho.eps = eps;
    ho.delta = delta;
    ho.sigma = sigma;
    ho.n = n;
    ho.x_max = x_max;
    ho.ny = ny;
    ho.n_u = 2048;
    ho.nY_ideal = 48;
    auto hy = build_hierarchy(ss, lead, ho);
    return Built{std::move(ss), std::move(lead), std::move(hy)};
}

}  // namespace

TEST_CASE("sigma schedule is the pure (i, n) function") {
    CHECK(sigma_schedule(2, 2) == doctest::Approx(1.0 / 1000.0).epsilon(1e-15));
    CHECK(sigma_schedule(1, 2) == doctest::Approx(1.0 / 3000.0).epsilon(1e-15));
    CHECK(sigma_schedule(3, 3) == doctest::Approx(1.0 / 1000.0).epsilon(1e-15));
    CHECK(sigma_schedule(1, 3) == doctest::Approx(1.0 / 9000.0).epsilon(1e-15));
}

TEST_CASE("cutoff: plateau, support and smoothness") {
    CHECK(cutoff_chi(0.3) == 1.0);
    CHECK(cutoff_chi(1.2) == 0.0);
    CHECK(cutoff_chi(0.75) == doctest::Approx(0.5));
    // C^2: derivative formulas agree with finite differences
    for (double s = 0.45; s <= 1.05; s += 0.01) {
        if (std::abs(s - 0.5) < 0.02 || std::abs(s - 1.0) < 0.02) continue;  // C^2 joints
        double h = 1e-6;
        CHECK(std::abs((cutoff_chi(s + h) - cutoff_chi(s - h)) / (2 * h) - cutoff_chi_d1(s)) <
              1e-5);
        CHECK(std::abs((cutoff_chi_d1(s + h) - cutoff_chi_d1(s - h)) / (2 * h) -
                       cutoff_chi_d2(s)) < 1e-4);
    }
}

TEST_CASE("zero lower orders produce zero forcing, zero trace, zero layer") {
    // delta = sigma = 0: leading layer and corrector vanish identically, so
    // the whole hierarchy must stay exactly zero.
    auto B = build_small(0.0, 0.0, 1e-3, 10.0, 160);
    CHECK(B.hy.forcing[0].f_u.max_abs() == 0.0);
    CHECK(B.hy.forcing[0].f_h.max_abs() == 0.0);
    CHECK(B.hy.layer[0].u.f.max_abs() == 0.0);
    CHECK(B.hy.layer[1].u.f.max_abs() == 0.0);
    CHECK(B.hy.tilde->u.f.max_abs() == 0.0);
    CHECK(B.hy.E_u.max_abs() == 0.0);
}

TEST_CASE("hierarchy structure at delta = sigma = 0.05, n = 2") {
    auto B = build_small(0.05, 0.05, 1e-3, 20.0, 224);
    Hierarchy& hy = B.hy;
    const std::size_t nx = hy.nsta(), ny = hy.ys.size();

    // wall traces equal the prescribed corrector traces exactly
    for (std::size_t k = 0; k < nx; ++k) {
        CHECK(hy.layer[0].u.f.at(k, 0) == doctest::Approx(-hy.ideal_g[0].ubar[k]).epsilon(1e-14));
        CHECK(hy.layer[0].h.f.at(k, 0) == doctest::Approx(-hy.ideal_g[0].hbar[k]).epsilon(1e-14));
    }

    // boundary-condition chain: v_e^{i}(x,0) = -v_p^{i-1}(x,0)
    for (std::size_t k = 0; k < nx; ++k) {
        CHECK(hy.ideal[1].v.at(k, 0) ==
              doctest::Approx(-hy.layer[0].v.at(k, 0)).epsilon(1e-10));
    }

    // final layer: (v, g)(x, 0) = 0 exactly, x-independent slices integrate to zero
    for (std::size_t k = 0; k < nx; ++k) {
        CHECK(hy.layer[1].v.at(k, 0) == 0.0);
        CHECK(hy.layer[1].g.at(k, 0) == 0.0);
    }

    // cut-off: plateau leaves v untouched, support kills it
    const double se = std::sqrt(hy.opt.eps);
    for (std::size_t k = 0; k < nx; k += 7)
        for (std::size_t j = 0; j < ny; j += 13) {
            double s = se * hy.ys[j] / std::sqrt(hy.xs[k]);
            if (s <= 0.5)
                CHECK(hy.tilde->v.at(k, j) == hy.layer[1].v.at(k, j));
            if (s >= 1.0) CHECK(hy.tilde->v.at(k, j) == 0.0);
        }

    // weighted sup bound of the cut final layer, z^m-scaled (m = 1):
    // sup z |u~| x^{1/2 - sigma_n} <= eps^{-1/2} C with moderate C
    double wsup = 0.0;
    for (std::size_t k = 0; k < nx; ++k)
        for (std::size_t j = 0; j < ny; ++j) {
            double z = hy.ys[j] / std::sqrt(hy.xs[k]);
            wsup = std::max(wsup, std::abs(z * hy.tilde->u.f.at(k, j)) *
                                      std::pow(hy.xs[k], 0.5 - sigma_schedule(2, 2)));
        }
    CHECK(wsup * se < 10.0);
}

TEST_CASE("forcing decay and epsilon bookkeeping") {
    auto B = build_small(0.05, 0.05, 1e-3, 50.0, 288);
    Hierarchy& hy = B.hy;
    // || f_u^{(1)}(x,.) ||_{L2_y} ~ x^{-5/4 + 2 sigma_0'}: window fit
    std::vector<double> norms(hy.nsta());
    for (std::size_t k = 0; k < hy.nsta(); ++k)
        norms[k] = l2_norm_grid(hy.ys, std::span<const double>(hy.forcing[0].f_u.row(k),
                                                               hy.ys.size()));
    auto fit = fit_decay_rate(hy.xs.nodes, norms);
    CHECK(std::abs(fit.exponent + 1.25) < 0.2);

    // epsilon-halving of the explicit prefactors with frozen profiles: the
    // double-integral Taylor-remainder term in R^{u,0} carries a factor eps
    // relative to the sqrt(eps) trace term; rebuilding the order-1 forcing at
    // eps/4 rescales f_u^{(1)} = -eps^{-1/2}(R^{u,0}+...) accordingly.
    HierarchyOptions ho2 = hy.opt;
    ho2.eps = hy.opt.eps / 4.0;
    Hierarchy hy2 = begin_hierarchy(B.ss, B.lead, ho2);
    add_ideal_order(hy2, 1);
    LayerForcing f2 = assemble_forcing(hy2, 1);
    // dominant terms of f_u^{(1)} are eps-free after the eps^{-1/2} scaling
    // of the sqrt(eps)-weighted trace extraction, so f barely moves with eps
    std::size_t k = hy.nsta() / 2;
    double n1 = l2_norm_grid(hy.ys, std::span<const double>(hy.forcing[0].f_u.row(k),
                                                            hy.ys.size()));
    double n2 = l2_norm_grid(hy.ys, std::span<const double>(f2.f_u.row(k), hy.ys.size()));
    CHECK(n2 == doctest::Approx(n1).epsilon(0.15));
}

TEST_CASE("intermediate and final layer decay fits (AC5 shapes)") {
    auto B = build_small(0.05, 0.05, 1e-3, 50.0, 288);
    Hierarchy& hy = B.hy;
    double s1 = sigma_schedule(1, 2), s2 = sigma_schedule(2, 2);

    std::vector<double> sup1(hy.nsta()), supn(hy.nsta()), supE(hy.nsta());
    for (std::size_t k = 0; k < hy.nsta(); ++k) {
        sup1[k] = linf_norm(std::span<const double>(hy.layer[0].u.f.row(k), hy.ys.size()));
        supn[k] = linf_norm(std::span<const double>(hy.tilde->u.f.row(k), hy.ys.size()));
        supE[k] = linf_norm(std::span<const double>(hy.E_u.row(k), hy.ys.size()));
    }
    auto f1 = fit_decay_rate(hy.xs.nodes, sup1);
    auto fn = fit_decay_rate(hy.xs.nodes, supn);
    // the cut-off support [eps y^2, 4 eps y^2] sits inside the domain only up
    // to x_max/2; past that the E terms are truncated at the outflow edge
    auto fE = fit_decay_rate(hy.xs.nodes, supE, 5.0, 25.0);
    CHECK(std::abs(f1.exponent - (-0.25 + s1)) < 0.15);
    CHECK(std::abs(fn.exponent - (-0.5 + s2)) < 0.15);
    // the cut-off error decays at least at the claimed rate (the literal
    // two-sided box is exercised by the acceptance suite; the measurable
    // transient is steeper, see notes there)
    CHECK(fE.exponent <= -1.5 + s2 + 0.25);
}

TEST_CASE("cutoff divergence identity is O(h^2)") {
    auto run = [&](std::size_t ny, double cap) {
        SelfSimilarOptions so;
        so.delta = 0.05;
        so.sigma = 0.05;
        auto ss = solve_selfsimilar(so);
        LeadingOptions lo;
        lo.x_max = 10.0;
        lo.n_eta = 160;
        lo.dx_cap = cap;
        auto lead = solve_leading(ss, lo);
        HierarchyOptions ho;
        ho.eps = 4e-3;
        ho.n = 2;
        ho.x_max = 10.0;
        ho.ny = ny;
        ho.n_u = 1024;
        ho.nY_ideal = 40;
        auto hy = build_hierarchy(ss, lead, ho);
        Field2D utx = d_dx(hy.tilde->u.f);
        // measure inside the transition band, where the cut-off acts
        double m = 0.0;
        for (std::size_t k = 1; k + 1 < hy.nsta(); ++k) {
            if (hy.xs[k] < 2.0 || hy.xs[k] > 5.0) continue;
            for (std::size_t j = 1; j + 1 < hy.ys.size(); ++j) {
                double sb = std::sqrt(4e-3) * hy.ys[j] / std::sqrt(hy.xs[k]);
                if (sb < 0.45 || sb > 1.05) continue;
                m = std::max(m, std::abs(utx.at(k, j) + hy.tilde->vy.at(k, j)));
            }
        }
        return m;
    };
    double a = run(160, 0.4), b = run(320, 0.2);
    CHECK(a / b > 1.8);
}

TEST_CASE("strict triangularity: order i ignores order i+1") {
    auto B = build_small(0.05, 0.05, 1e-3, 10.0, 160);
    Hierarchy& hy = B.hy;
    // recompute order 1 forcing after perturbing the stored order-2 fields
    std::vector<double> before = hy.forcing[0].f_u.v;
    for (auto& v : hy.layer[1].u.f.v) v += 0.123;
    for (auto& v : hy.ideal_g[1].ue.v) v += 0.456;
    LayerForcing f1 = assemble_forcing(hy, 1);
    CHECK(f1.f_u.v == before);
}
