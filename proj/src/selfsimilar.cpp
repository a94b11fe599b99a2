#include "pmhd/selfsimilar.hpp"

#include <cmath>

#include "pmhd/diff.hpp"
#include "pmhd/errors.hpp"
#include "pmhd/tridiag.hpp"

namespace pmhd {

void SelfSimilarProfiles::build_interpolants() {
    phi_i = Pchip(z.nodes, phi, true);
    psi_i = Pchip(z.nodes, psi, true);
    auto dphi = deriv1(z.nodes, phi);
    auto dpsi = deriv1(z.nodes, psi);
    auto d2phi = deriv2(z.nodes, phi);
    auto d2psi = deriv2(z.nodes, psi);
    dphi_i = Pchip(z.nodes, dphi, true);
    dpsi_i = Pchip(z.nodes, dpsi, true);
    d2phi_i = Pchip(z.nodes, d2phi, true);
    d2psi_i = Pchip(z.nodes, d2psi, true);
}

double SelfSimilarProfiles::phi_star_at(double zv) const {
    return Front(delta).eval(zv).e + (zv <= z.back() ? phi_i.eval(zv) : 0.0);
}
double SelfSimilarProfiles::psi_star_at(double zv) const {
    return Front(sigma).eval(zv).e + (zv <= z.back() ? psi_i.eval(zv) : 0.0);
}
double SelfSimilarProfiles::dphi_star_at(double zv) const {
    return Front(delta).eval(zv).e_prime + (zv <= z.back() ? dphi_i.eval(zv) : 0.0);
}
double SelfSimilarProfiles::dpsi_star_at(double zv) const {
    return Front(sigma).eval(zv).e_prime + (zv <= z.back() ? dpsi_i.eval(zv) : 0.0);
}
double SelfSimilarProfiles::d2phi_star_at(double zv) const {
    return Front(delta).eval(zv).e_double_prime + (zv <= z.back() ? d2phi_i.eval(zv) : 0.0);
}
double SelfSimilarProfiles::d2psi_star_at(double zv) const {
    return Front(sigma).eval(zv).e_double_prime + (zv <= z.back() ? d2psi_i.eval(zv) : 0.0);
}

void solve_linearized_pair(const Grid1D& z, double sigma,
                           const std::vector<double>& f1, const std::vector<double>& f2,
                           std::vector<double>& phi, std::vector<double>& psi) {
    const std::size_t n = z.size();
    if (f1.size() != n || f2.size() != n)
        throw PreconditionError("solve_linearized_pair: forcing size mismatch");
    const Front es(sigma);
    std::vector<Block2> lo(n), di(n), up(n);
    std::vector<Vec2> rhs(n);
    // Dirichlet rows
    di[0] = di[n - 1] = {1, 0, 0, 1};
    lo[0] = up[0] = lo[n - 1] = up[n - 1] = {0, 0, 0, 0};
    rhs[0] = rhs[n - 1] = {0, 0};
    const double h = z[1] - z[0];  // uniform z-grid
    for (std::size_t j = 1; j + 1 < n; ++j) {
        double zj = z[j];
        double e = es.eval(zj).e;
        double adv = zj / (4.0 * h);        // (z/2) * 1/(2h)
        double cross = zj * e / (4.0 * h);  // (z/2) e_sigma * 1/(2h)
        double d2 = 1.0 / (h * h);
        lo[j] = {-d2 + adv, -cross, -cross, -d2 + adv};
        di[j] = {2 * d2, 0, 0, 2 * d2};
        up[j] = {-d2 - adv, cross, cross, -d2 - adv};
        rhs[j] = {f1[j], f2[j]};
    }
    auto sol = solve_block_tridiagonal(lo, di, up, rhs);
    phi.resize(n);
    psi.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        phi[j] = sol[j][0];
        psi[j] = sol[j][1];
    }
}

namespace {

// Right-hand sides of the fixed-point map: the full nonlinear system with the
// previous iterate frozen, front derivatives in closed form, iterate
// derivatives by centered differences.
void assemble_rhs(const Grid1D& z, double delta, double sigma,
                  const std::vector<double>& bphi, const std::vector<double>& bpsi,
                  std::vector<double>& f1, std::vector<double>& f2) {
    const std::size_t n = z.size();
    const Front ed(delta), es(sigma);
    auto dbphi = deriv1(z.nodes, bphi);
    auto dbpsi = deriv1(z.nodes, bpsi);
    auto d2bphi = deriv2(z.nodes, bphi);
    auto d2bpsi = deriv2(z.nodes, bpsi);
    f1.assign(n, 0.0);
    f2.assign(n, 0.0);
    for (std::size_t j = 1; j + 1 < n; ++j) {
        double zj = z[j];
        auto Ed = ed.eval(zj);
        auto Es = es.eval(zj);
        double a = bphi[j] + Ed.e - delta;  // phi* - delta at the iterate
        double one_a = 1.0 + a;
        double two_a = 2.0 + a;
        double dps = dbpsi[j] + Es.e_prime;
        double dph = dbphi[j] + Ed.e_prime;
        f1[j] = 0.5 * zj * a * dbphi[j] - 0.5 * zj * bpsi[j] * dbpsi[j] -
                0.5 * zj * (Es.e + bpsi[j]) * Es.e_prime + a * two_a * d2bphi[j] +
                a * one_a * Ed.e_double_prime - one_a * (dps * dps - dph * dph);
        f2[j] = 0.5 * zj * a * dbpsi[j] - 0.5 * zj * bpsi[j] * dbphi[j] -
                0.5 * zj * (Es.e + bpsi[j]) * Ed.e_prime + a * two_a * d2bpsi[j] +
                a * one_a * Es.e_double_prime;
    }
}

double hw2_total(const Grid1D& z, const std::vector<double>& a, const std::vector<double>& b) {
    return hw2_norm(z, a, b).total();
}

}  // namespace

SelfSimilarProfiles solve_selfsimilar(const SelfSimilarOptions& opt) {
    if (opt.delta > 0.1 + 1e-15 || opt.sigma > 0.1 + 1e-15)
        throw PreconditionError("solve_selfsimilar: delta, sigma must be <= 0.1 (smallness regime)");
    SelfSimilarProfiles p;
    p.z = uniform_grid(0.0, opt.z_max, opt.nz, Frame::z);
    p.delta = opt.delta;
    p.sigma = opt.sigma;
    const std::size_t n = opt.nz;
    p.phi.assign(n, 0.0);
    p.psi.assign(n, 0.0);

    if (opt.delta == 0.0 && opt.sigma == 0.0) {
        p.iterations = 0;
        p.hw2 = hw2_norm(p.z, p.phi, p.psi);
        p.build_interpolants();
        p.nonlinear_residual = reconstruct_star(p);
        return p;
    }

    std::vector<double> f1, f2, nphi, npsi, dphi(n), dpsi(n);
    for (int it = 0; it < opt.max_iter; ++it) {
        assemble_rhs(p.z, opt.delta, opt.sigma, p.phi, p.psi, f1, f2);
        solve_linearized_pair(p.z, opt.sigma, f1, f2, nphi, npsi);
        for (std::size_t j = 0; j < n; ++j) {
            dphi[j] = nphi[j] - p.phi[j];
            dpsi[j] = npsi[j] - p.psi[j];
        }
        double diff = hw2_total(p.z, dphi, dpsi);
        p.iterate_diffs.push_back(diff);
        p.phi.swap(nphi);
        p.psi.swap(npsi);
        p.iterations = it + 1;
        if (diff < opt.tol_picard) break;
        if (it >= 3) {
            const auto& h = p.iterate_diffs;
            if (h[h.size() - 1] > 4.0 * h[h.size() - 3] && h[h.size() - 1] > 1.0)
                throw DivergenceError("solve_selfsimilar: Picard iteration diverging "
                                      "(delta/sigma outside the smallness regime)",
                                      p.iterate_diffs);
        }
    }
    if (!p.iterate_diffs.empty() && p.iterate_diffs.back() >= opt.tol_picard)
        throw DivergenceError("solve_selfsimilar: no convergence in max_iter", p.iterate_diffs);

    p.hw2 = hw2_norm(p.z, p.phi, p.psi);
    p.build_interpolants();
    p.nonlinear_residual = reconstruct_star(p);
    return p;
}

double reconstruct_star(SelfSimilarProfiles& p) {
    const std::size_t n = p.z.size();
    const Front ed(p.delta), es(p.sigma);
    p.phi_star.assign(n, 0.0);
    p.psi_star.assign(n, 0.0);
    auto dphi = deriv1(p.z.nodes, p.phi);
    auto dpsi = deriv1(p.z.nodes, p.psi);
    auto d2phi = deriv2(p.z.nodes, p.phi);
    auto d2psi = deriv2(p.z.nodes, p.psi);
    p.dphi_star.assign(n, 0.0);
    p.dpsi_star.assign(n, 0.0);
    p.d2phi_star.assign(n, 0.0);
    p.d2psi_star.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        auto Ed = ed.eval(p.z[j]);
        auto Es = es.eval(p.z[j]);
        p.phi_star[j] = p.phi[j] + Ed.e;
        p.psi_star[j] = p.psi[j] + Es.e;
        p.dphi_star[j] = dphi[j] + Ed.e_prime;
        p.dpsi_star[j] = dpsi[j] + Es.e_prime;
        p.d2phi_star[j] = d2phi[j] + Ed.e_double_prime;
        p.d2psi_star[j] = d2psi[j] + Es.e_double_prime;
    }

    // Direct substitution into the (phi*, psi*) system: corrections by finite
    // differences, fronts in closed form.
    double rmax = 0.0;
    for (std::size_t j = 1; j + 1 < n; ++j) {
        double zj = p.z[j];
        double ps = p.phi_star[j], qs = p.psi_star[j];
        double dps = p.dphi_star[j], dqs = p.dpsi_star[j];
        double d2ps = p.d2phi_star[j], d2qs = p.d2psi_star[j];
        double one_a = 1.0 - p.delta + ps;
        double r1 = one_a * one_a * d2ps + 0.5 * zj * one_a * dps - 0.5 * zj * qs * dqs -
                    one_a * (dqs * dqs - dps * dps);
        double r2 = one_a * one_a * d2qs + 0.5 * zj * one_a * dqs - 0.5 * zj * qs * dps;
        rmax = std::max(rmax, std::max(std::abs(r1), std::abs(r2)));
    }
    return rmax;
}

}  // namespace pmhd
