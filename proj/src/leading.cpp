#include "pmhd/leading.hpp"

#include <cmath>

#include "pmhd/diff.hpp"
#include "pmhd/errors.hpp"
#include "pmhd/quadrature.hpp"
#include "pmhd/tridiag.hpp"

namespace pmhd {

double LeadingOptions::eta_top() const {
    return eta_max > 0.0 ? eta_max : z_cov * std::sqrt(x_max);
}

double default_inflow_u0(double delta, double y) {
    return -delta * std::exp(-0.25 * y * y * y * y);
}

namespace {

struct StarRows {
    std::vector<double> P, Q;    // phi*, psi*
    std::vector<double> P1, Q1;  // d_eta
    std::vector<double> P2, Q2;  // d_eta^2
    std::vector<double> Px, Qx;  // d_x
};

StarRows star_rows(const SelfSimilarProfiles& ss, const Grid1D& eta, double x) {
    StarRows r;
    const std::size_t n = eta.size();
    r.P.resize(n); r.Q.resize(n);
    r.P1.resize(n); r.Q1.resize(n);
    r.P2.resize(n); r.Q2.resize(n);
    r.Px.resize(n); r.Qx.resize(n);
    const double sx = std::sqrt(x);
    for (std::size_t j = 0; j < n; ++j) {
        double z = eta[j] / sx;
        double dp = ss.dphi_star_at(z), dq = ss.dpsi_star_at(z);
        r.P[j] = ss.phi_star_at(z);
        r.Q[j] = ss.psi_star_at(z);
        r.P1[j] = dp / sx;
        r.Q1[j] = dq / sx;
        r.P2[j] = ss.d2phi_star_at(z) / x;
        r.Q2[j] = ss.d2psi_star_at(z) / x;
        r.Px[j] = -0.5 * z / x * dp;
        r.Qx[j] = -0.5 * z / x * dq;
    }
    return r;
}

// One backward-Euler step of the error system from (wp, omp) at x-dx to x.
// Returns false if the inner Picard iteration did not reach tol.
bool error_step(const SelfSimilarProfiles& ss, const Grid1D& eta, double delta,
                double x, double dx, const std::vector<double>& wp,
                const std::vector<double>& omp, std::vector<double>& wout,
                std::vector<double>& omout, double tol, int max_inner) {
    const std::size_t n = eta.size();
    const double om1 = 1.0 - delta;
    StarRows s = star_rows(ss, eta, x);

    // constant left side (1-d)/dx - (1-d)^2 d_eta^2 with Dirichlet rows
    std::vector<double> lo(n, 0.0), di(n, 0.0), up(n, 0.0);
    di[0] = di[n - 1] = 1.0;
    for (std::size_t j = 1; j + 1 < n; ++j) {
        double hm = eta[j] - eta[j - 1], hp = eta[j + 1] - eta[j];
        double c = 2.0 / (hm * hp * (hm + hp));
        lo[j] = -om1 * om1 * c * hp;
        di[j] = om1 / dx + om1 * om1 * c * (hm + hp);
        up[j] = -om1 * om1 * c * hm;
    }

    std::vector<double> wbar(wp), ombar(omp), weta(n), ometa(n), wee(n), omee(n);
    std::vector<double> rw(n), rom(n);
    for (int it = 0; it < max_inner; ++it) {
        deriv1_line(eta.nodes, wbar, weta);
        deriv1_line(eta.nodes, ombar, ometa);
        deriv2_line(eta.nodes, wbar, wee);
        deriv2_line(eta.nodes, ombar, omee);
        rw[0] = rom[0] = rw[n - 1] = rom[n - 1] = 0.0;
        for (std::size_t j = 1; j + 1 < n; ++j) {
            double w = wbar[j], om = ombar[j];
            double wx = (w - wp[j]) / dx, omx = (om - omp[j]) / dx;
            double P = s.P[j], Q = s.Q[j];
            double cdiff = w * w + 2.0 * om1 * w;        // w^2 + 2(1-d)w
            double cstar = P * P + 2.0 * (om1 + w) * P;  // phi*^2 + 2(1-d+w)phi*
            double cmid = w * w + 2.0 * (om1 + P) * w;   // w^2 + 2(1-d+phi*)w
            double rhs_w = cdiff * wee[j] - w * wx + om * omx - P * wx + Q * omx +
                           cmid * s.P2[j] - w * s.Px[j] + om * s.Qx[j] + cstar * wee[j] +
                           w * (s.P1[j] * s.P1[j] - s.Q1[j] * s.Q1[j]) +
                           (om1 + w + P) * (weta[j] * weta[j] - ometa[j] * ometa[j] +
                                            2.0 * weta[j] * s.P1[j] - 2.0 * ometa[j] * s.Q1[j]);
            double rhs_om = cdiff * omee[j] - w * omx + om * wx + cmid * s.Q2[j] -
                            w * s.Qx[j] + om * s.Px[j] + cstar * omee[j] - P * omx + Q * wx;
            rw[j] = om1 / dx * wp[j] + rhs_w;
            rom[j] = om1 / dx * omp[j] + rhs_om;
        }
        auto wn = solve_tridiagonal(lo, di, up, rw);
        auto omn = solve_tridiagonal(lo, di, up, rom);
        double diff = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            diff = std::max(diff, std::abs(wn[j] - wbar[j]));
            diff = std::max(diff, std::abs(omn[j] - ombar[j]));
        }
        wbar.swap(wn);
        ombar.swap(omn);
        if (diff < tol) {
            wout = wbar;
            omout = ombar;
            return true;
        }
    }
    return false;
}

}  // namespace

ErrorFields march_error_system(const SelfSimilarProfiles& ss, const LeadingOptions& opt,
                               const std::vector<double>* w0in,
                               const std::vector<double>* om0in) {
    const double delta = opt.delta, sigma = opt.sigma;
    Grid1D xs = station_grid(opt.x_max, opt.dx0, opt.dx_ratio, opt.dx_cap);
    Grid1D eta = sinh_grid(opt.eta_top(), opt.n_eta, Frame::eta, opt.stretch);
    const std::size_t n = eta.size();

    // Default inflow data mapped to the von Mises frame: eta(y) from the
    // analytic profile, inverted on a fine auxiliary grid.
    std::vector<double> w0(n, 0.0), om0(n, 0.0);
    if (w0in && om0in) {
        if (w0in->size() != n || om0in->size() != n)
            throw PreconditionError("march_error_system: initial slice size mismatch");
        w0 = *w0in;
        om0 = *om0in;
    } else {
        const std::size_t nf = 8192;
        double y_top = opt.eta_top() / (1.0 - delta) + 1.0;
        std::vector<double> yf(nf), one_plus_u(nf);
        for (std::size_t i = 0; i < nf; ++i) {
            yf[i] = y_top * double(i) / double(nf - 1);
            one_plus_u[i] = 1.0 + default_inflow_u0(delta, yf[i]);
        }
        auto etaf = cumtrapz(yf, one_plus_u);
        Pchip y_of_eta(etaf, yf);
        for (std::size_t j = 1; j + 1 < n; ++j) {
            double y = y_of_eta.eval(eta[j]);
            double z = eta[j];  // x = 1
            w0[j] = default_inflow_u0(delta, y) + delta - ss.phi_star_at(z);
            om0[j] = -sigma * std::exp(-0.25 * y * y * y * y) + sigma - ss.psi_star_at(z);
        }
    }

    ErrorFields ef;
    ef.w = Field2D(xs, eta, Frame::eta);
    ef.omega = Field2D(xs, eta, Frame::eta);
    for (std::size_t j = 0; j < n; ++j) {
        ef.w.at(0, j) = w0[j];
        ef.omega.at(0, j) = om0[j];
    }

    std::vector<double> wp = w0, omp = om0, wn, omn;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        double x_prev = xs[i - 1], x = xs[i];
        int sub = 1;
        bool ok = false;
        while (sub <= 8 && !ok) {
            std::vector<double> wa = wp, oma = omp;
            ok = true;
            for (int k = 0; k < sub && ok; ++k) {
                double xb = x_prev + (x - x_prev) * double(k + 1) / sub;
                ok = error_step(ss, eta, delta, xb, (x - x_prev) / sub, wa, oma, wn, omn,
                                opt.tol_inner, opt.max_inner);
                if (ok) {
                    wa.swap(wn);
                    oma.swap(omn);
                }
            }
            if (ok) {
                wp = wa;
                omp = oma;
            } else {
                sub *= 2;
            }
        }
        if (!ok)
            throw DivergenceError("march_error_system: inner iteration failed at station " +
                                  std::to_string(i) + " (x = " + std::to_string(x) + ")");
        for (std::size_t j = 0; j < n; ++j) {
            ef.w.at(i, j) = wp[j];
            ef.omega.at(i, j) = omp[j];
        }
        double sx = std::sqrt(x);
        for (std::size_t j = 0; j < n; ++j) {
            double opu = 1.0 - delta + ss.phi_star_at(eta[j] / sx) + wp[j];
            if (opu < opt.c0_min)
                throw PositivityError("march_error_system: 1+u_p0 below floor", opu, x, eta[j]);
        }
    }
    ef.q_report = q_norm(ef.w, ef.omega, opt.sigma0);
    return ef;
}

void compose_leading(const SelfSimilarProfiles& ss, const ErrorFields& err,
                     Field2D& u_eta, Field2D& h_eta, double delta, double sigma) {
    u_eta = Field2D(err.w.xs, err.w.ys, Frame::eta);
    h_eta = Field2D(err.w.xs, err.w.ys, Frame::eta);
    for (std::size_t i = 0; i < err.w.nx(); ++i) {
        double sx = std::sqrt(err.w.xs[i]);
        for (std::size_t j = 0; j < err.w.ny(); ++j) {
            double z = err.w.ys[j] / sx;
            u_eta.at(i, j) = ss.phi_star_at(z) + err.w.at(i, j) - delta;
            h_eta.at(i, j) = ss.psi_star_at(z) + err.omega.at(i, j) - sigma;
        }
    }
}

LeadingLayer solve_leading(const SelfSimilarProfiles& ss, const LeadingOptions& opt) {
    LeadingLayer L;
    L.delta = opt.delta;
    L.sigma = opt.sigma;
    ErrorFields err = march_error_system(ss, opt);
    L.xs = err.w.xs;
    L.eta = err.w.ys;
    compose_leading(ss, err, L.u_eta, L.h_eta, opt.delta, opt.sigma);

    const std::size_t nx = L.xs.size(), ne = L.eta.size();
    L.y_of_eta.assign(nx, {});
    double y_top_min = 1e300;
    for (std::size_t i = 0; i < nx; ++i) {
        std::vector<double> integrand(ne);
        for (std::size_t j = 0; j < ne; ++j) {
            double opu = 1.0 + L.u_eta.at(i, j);
            if (opu < opt.c0_min)
                throw PositivityError("invert_von_mises: 1+u_p0 below floor", opu, L.xs[i],
                                      L.eta[j]);
            integrand[j] = 1.0 / opu;
        }
        L.y_of_eta[i] = cumtrapz(L.eta.nodes, integrand);
        y_top_min = std::min(y_top_min, L.y_of_eta[i].back());
    }

    Grid1D ygrid = sinh_grid(y_top_min * (1.0 - 1e-9), ne, Frame::y, opt.stretch);
    L.u = Field2D(L.xs, ygrid, Frame::y);
    L.h = Field2D(L.xs, ygrid, Frame::y);

    double roundtrip = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
        Pchip ymap(L.eta.nodes, L.y_of_eta[i]);
        Pchip urow(L.eta.nodes, L.u_eta.row_copy(i));
        Pchip hrow(L.eta.nodes, L.h_eta.row_copy(i));
        for (std::size_t j = 0; j < ne; ++j) {
            double et = ymap.inverse(ygrid[j]);
            L.u.at(i, j) = urow.eval(et);
            L.h.at(i, j) = hrow.eval(et);
        }
        for (std::size_t j = 1; j + 2 < ne; j += 7) {
            double em = 0.5 * (L.eta[j] + L.eta[j + 1]);
            roundtrip = std::max(roundtrip, std::abs(ymap.inverse(ymap.eval(em)) - em));
        }
    }
    L.von_mises_roundtrip = roundtrip;

    Field2D ux = d_dx(L.u), hx = d_dx(L.h);
    L.v = Field2D(L.xs, ygrid, Frame::y);
    L.g = Field2D(L.xs, ygrid, Frame::y);
    L.vbar_e1.assign(nx, 0.0);
    L.gbar_e1.assign(nx, 0.0);
    L.gbar_raw.assign(nx, 0.0);
    for (std::size_t i = 0; i < nx; ++i) {
        auto vrow = tail_integrals(ygrid, std::span<const double>(ux.row(i), ne), opt.tail_tol);
        auto grow = tail_integrals(ygrid, std::span<const double>(hx.row(i), ne), opt.tail_tol);
        for (std::size_t j = 0; j < ne; ++j) {
            L.v.at(i, j) = vrow[j];
            L.g.at(i, j) = grow[j];
        }
        L.vbar_e1[i] = -vrow[0];
        L.gbar_e1[i] = opt.sigma * L.vbar_e1[i];
        L.gbar_raw[i] = -grow[0];
    }

    L.c0 = 1e300;
    L.c1 = 1e300;
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ne; ++j) {
            double opu = 1.0 + L.u.at(i, j);
            L.c0 = std::min(L.c0, opu);
            L.c1 = std::min(L.c1, opu - (opt.sigma + L.h.at(i, j)));
        }
    return L;
}

Field2D first_integral_residual(const LeadingLayer& L) {
    Field2D hy = d_dy(L.h);
    Field2D r(L.xs, L.u.ys, Frame::y);
    for (std::size_t i = 0; i < L.xs.size(); ++i)
        for (std::size_t j = 0; j < L.u.ny(); ++j) {
            double opu = 1.0 + L.u.at(i, j);
            r.at(i, j) = -opu * (L.g.at(i, j) + L.gbar_e1[i]) +
                         (L.v.at(i, j) + L.vbar_e1[i]) * (L.sigma + L.h.at(i, j)) - hy.at(i, j);
        }
    return r;
}

}  // namespace pmhd
