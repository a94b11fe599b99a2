#include "pmhd/layers.hpp"

#include <cmath>

#include "pmhd/errors.hpp"
#include "pmhd/parallel.hpp"
#include "pmhd/quadrature.hpp"
#include "pmhd/tridiag.hpp"

namespace pmhd {

double sigma_schedule(int i, int n) {
    if (i < 0 || n < 2) throw PreconditionError("sigma_schedule: need n >= 2, i >= 0");
    return std::pow(3.0, double(i - n)) / 1000.0;
}

namespace {
// quintic smoothstep and derivatives on the transition variable t = 2s-1
inline double S5(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
inline double S5d(double t) { return 30.0 * t * t * (t - 1.0) * (t - 1.0); }
inline double S5dd(double t) { return 60.0 * t * (2.0 * t - 1.0) * (t - 1.0); }
inline double S5ddd(double t) { return 360.0 * t * t - 360.0 * t + 60.0; }
}  // namespace

double cutoff_chi(double s) {
    if (s <= 0.5) return 1.0;
    if (s >= 1.0) return 0.0;
    return 1.0 - S5(2.0 * s - 1.0);
}
double cutoff_chi_d1(double s) {
    if (s <= 0.5 || s >= 1.0) return 0.0;
    return -2.0 * S5d(2.0 * s - 1.0);
}
double cutoff_chi_d2(double s) {
    if (s <= 0.5 || s >= 1.0) return 0.0;
    return -4.0 * S5dd(2.0 * s - 1.0);
}
double cutoff_chi_d3(double s) {
    if (s <= 0.5 || s >= 1.0) return 0.0;
    return -8.0 * S5ddd(2.0 * s - 1.0);
}

namespace {

Field2D resample_lead(const Field2D& src, const Grid1D& xs, const Grid1D& ys) {
    // shared stations; PCHIP in y with zero extension past the layer grid
    Field2D out(xs, ys, Frame::y);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        Pchip row(src.ys.nodes, src.row_copy(i), true);
        for (std::size_t j = 0; j < ys.size(); ++j) out.at(i, j) = row.eval(ys[j]);
    }
    return out;
}

IdealOnGrid sample_ideal(const IdealCorrector& c, const Grid1D& xs, const Grid1D& ys,
                         double eps) {
    IdealOnGrid g;
    const double se = std::sqrt(eps);
    auto sample = [&](const Field2D& f) {
        Field2D out(xs, ys, Frame::y);
        par::parallel_for(std::int64_t(xs.size()), [&](std::int64_t ii) {
            std::size_t i = std::size_t(ii);
            Pchip row(f.ys.nodes, f.row_copy(i));
            for (std::size_t j = 0; j < ys.size(); ++j) out.at(i, j) = row.eval(se * ys[j]);
        });
        return out;
    };
    g.ue = sample(c.u);
    g.ve = sample(c.v);
    g.veY = sample(c.vY);
    g.vex = sample(c.vx);
    g.veYY = sample(c.vYY);
    g.vexY = sample(c.vxY);
    g.ubar.assign(c.ubar.begin(), c.ubar.begin() + std::ptrdiff_t(xs.size()));
    g.hbar.assign(c.hbar.begin(), c.hbar.begin() + std::ptrdiff_t(xs.size()));
    return g;
}

// Partial-sum coefficient fields through level m (plain sums take layers < m
// and ideal orders <= m, bar sums take the layer at m too).
struct SumLevel {
    Field2D us, hs, us_bar, hs_bar;
    Field2D usx, hsx;
    Field2D vs, gs, vs_bar, gs_bar;
    Field2D vsx, gsx, vs_bar_y, gs_bar_y;
};

SumLevel build_sums(const Hierarchy& hy, int m) {
    const double eps = hy.opt.eps, sg = hy.opt.sigma, se = std::sqrt(eps);
    SumLevel S;
    Field2D zero(hy.xs, hy.ys, Frame::y);
    S.us = zero; S.hs = zero;
    S.usx = zero; S.hsx = zero;
    S.vs = zero; S.gs = zero;
    S.vsx = zero; S.gsx = zero; S.vs_bar_y = zero; S.gs_bar_y = zero;
    const std::size_t N = zero.v.size();
    for (std::size_t q = 0; q < N; ++q) {
        S.us.v[q] = 1.0 + hy.u0.f.v[q];
        S.hs.v[q] = sg + hy.h0.f.v[q];
        S.usx.v[q] = hy.u0.x.v[q];
        S.hsx.v[q] = hy.h0.x.v[q];
        S.vs.v[q] = hy.v0.v[q];
        S.gs.v[q] = hy.g0.v[q];
        S.vsx.v[q] = hy.v0x.v[q];
        S.gsx.v[q] = hy.g0x.v[q];
        S.vs_bar_y.v[q] = hy.v0y.v[q];
        S.gs_bar_y.v[q] = hy.g0y.v[q];
    }
    for (int j = 1; j <= m; ++j) {
        double ej = std::pow(eps, 0.5 * double(j));
        double ejm = std::pow(eps, 0.5 * double(j - 1));
        const IdealOnGrid& id = hy.ideal_g[std::size_t(j - 1)];
        const ProfileOrder* lp =
            (std::size_t(j) <= hy.layer.size()) ? &hy.layer[std::size_t(j - 1)] : nullptr;
        for (std::size_t q = 0; q < N; ++q) {
            double ue = id.ue.v[q], ve = id.ve.v[q];
            double uex = -id.veY.v[q];
            S.us.v[q] += ej * ue;
            S.hs.v[q] += ej * sg * ue;
            S.usx.v[q] += ej * uex;
            S.hsx.v[q] += ej * sg * uex;
            S.vs.v[q] += ejm * ve;
            S.gs.v[q] += ejm * sg * ve;
            S.vsx.v[q] += ejm * id.vex.v[q];
            S.gsx.v[q] += ejm * sg * id.vex.v[q];
            S.vs_bar_y.v[q] += ejm * se * id.veY.v[q];
            S.gs_bar_y.v[q] += ejm * se * sg * id.veY.v[q];
            if (lp) {
                if (j <= m - 1) {
                    S.us.v[q] += ej * lp->u.f.v[q];
                    S.hs.v[q] += ej * lp->h.f.v[q];
                    S.usx.v[q] += ej * lp->u.x.v[q];
                    S.hsx.v[q] += ej * lp->h.x.v[q];
                    S.vs.v[q] += ej * lp->v.v[q];
                    S.gs.v[q] += ej * lp->g.v[q];
                    S.vsx.v[q] += ej * lp->vx.v[q];
                    S.gsx.v[q] += ej * lp->gx.v[q];
                }
                S.vs_bar_y.v[q] += ej * lp->vy.v[q];
                S.gs_bar_y.v[q] += ej * lp->gy.v[q];
            }
        }
    }
    S.us_bar = S.us;
    S.hs_bar = S.hs;
    S.vs_bar = S.vs;
    S.gs_bar = S.gs;
    if (m >= 1 && std::size_t(m) <= hy.layer.size()) {
        const ProfileOrder& lm = hy.layer[std::size_t(m - 1)];
        double em = std::pow(eps, 0.5 * double(m));
        for (std::size_t q = 0; q < N; ++q) {
            S.us_bar.v[q] += em * lm.u.f.v[q];
            S.hs_bar.v[q] += em * lm.h.f.v[q];
            S.vs_bar.v[q] += em * lm.v.v[q];
            S.gs_bar.v[q] += em * lm.g.v[q];
        }
    }
    return S;
}

// T[F](x,y) = int_0^y int_y^theta F(x,tau) dtau dtheta = int_0^y W - y W(y),
// W(theta) = int_0^theta F: the exact Taylor remainder of the wall-trace
// extraction of the ideal fields.
void double_tail_kernel(const Grid1D& ys, std::span<const double> F, std::span<double> out) {
    auto W = cumtrapz(ys.nodes, F);
    auto IW = cumtrapz(ys.nodes, W);
    for (std::size_t j = 0; j < ys.size(); ++j) out[j] = IW[j] - ys[j] * W[j];
}

std::vector<double> tail_int(const Grid1D& ys, std::span<const double> f) {
    std::vector<double> T(ys.size(), 0.0);
    for (std::size_t j = ys.size() - 1; j-- > 0;)
        T[j] = T[j + 1] + 0.5 * (f[j] + f[j + 1]) * (ys[j + 1] - ys[j]);
    return T;
}

}  // namespace

Hierarchy begin_hierarchy(const SelfSimilarProfiles& ss, const LeadingLayer& lead,
                          const HierarchyOptions& opt) {
    Hierarchy hy;
    hy.opt = opt;
    hy.ss = ss;
    hy.lead = lead;
    hy.xs = lead.xs;
    double y_top = opt.y_margin * std::sqrt(opt.x_max / opt.eps);
    hy.ys = sinh_grid(y_top, opt.ny, Frame::y, opt.stretch);

    // corrector stations: the layer stations continued geometrically
    {
        std::vector<double> ext(hy.xs.nodes);
        double x = ext.back();
        double dx = x - ext[ext.size() - 2];
        while (x < opt.corrector_extend * opt.x_max) {
            dx *= 1.05;
            x += dx;
            ext.push_back(x);
        }
        hy.xs_ext = Grid1D(std::move(ext), GridKind::stretched, Frame::x);
    }

    hy.u0 = DerivSet::of(resample_lead(lead.u, hy.xs, hy.ys));
    hy.h0 = DerivSet::of(resample_lead(lead.h, hy.xs, hy.ys));
    hy.v0 = resample_lead(lead.v, hy.xs, hy.ys);
    hy.g0 = resample_lead(lead.g, hy.xs, hy.ys);
    hy.v0x = d_dx(hy.v0);
    hy.v0y = d_dy(hy.v0);
    hy.v0xx = d2_dx2(hy.v0);
    hy.v0yy = d2_dy2(hy.v0);
    hy.g0x = d_dx(hy.g0);
    hy.g0y = d_dy(hy.g0);
    return hy;
}

std::vector<double> corrector_wall_data(const Hierarchy& hy, int i) {
    const std::size_t nx = hy.nsta();
    std::vector<double> b(hy.xs_ext.size(), 0.0);
    if (i == 1) {
        for (std::size_t k = 0; k < nx; ++k) b[k] = hy.lead.vbar_e1[k];
    } else {
        const ProfileOrder& prev = hy.layer.at(std::size_t(i - 2));
        for (std::size_t k = 0; k < nx; ++k) b[k] = -prev.v.at(k, 0);
    }
    // continue the trace onto the extension stations by its fitted tail
    BoundaryData bd = BoundaryData::from_samples(
        hy.xs, std::span<const double>(b.data(), nx), i == 1 ? -0.5 : -0.75);
    for (std::size_t k = nx; k < hy.xs_ext.size(); ++k) b[k] = bd(hy.xs_ext[k]);
    return b;
}

void add_ideal_order(Hierarchy& hy, int i) {
    if (std::size_t(i) != hy.ideal.size() + 1)
        throw DependencyError("add_ideal_order: orders must be built in sequence");
    IdealOptions iopt;
    iopt.nY = hy.opt.nY_ideal;
    iopt.n_u = hy.opt.n_u;
    iopt.tail_rho_fallback = (i == 1) ? -0.5 : -0.75;
    auto b = corrector_wall_data(hy, i);
    hy.ideal.push_back(poisson_extend(i, hy.xs_ext, b, hy.opt.sigma, iopt));
    hy.ideal_g.push_back(sample_ideal(hy.ideal.back(), hy.xs, hy.ys, hy.opt.eps));
}

LayerForcing assemble_forcing(const Hierarchy& hy, int i) {
    if (hy.ideal_g.size() < std::size_t(i))
        throw DependencyError("assemble_forcing: ideal corrector order missing");
    if (hy.layer.size() + 1 < std::size_t(i))
        throw DependencyError("assemble_forcing: lower layer orders missing");
    const double eps = hy.opt.eps, sg = hy.opt.sigma, se = std::sqrt(eps);
    const std::size_t nx = hy.nsta(), ny = hy.ys.size();
    const IdealOnGrid& idi = hy.ideal_g[std::size_t(i - 1)];
    const int m = i - 1;

    LayerForcing F;
    F.order = i;
    Field2D Ru(hy.xs, hy.ys, Frame::y), Rh = Ru, Rv = Ru, REu = Ru, REh = Ru, REv = Ru;

    // ---- R^{u,m}, R^{h,m}, R^{v,m}: the previous order's remainder ----
    if (m == 0) {
        par::parallel_for(std::int64_t(nx), [&](std::int64_t kk) {
            std::size_t k = std::size_t(kk);
            std::vector<double> Fcol(ny), Tv(ny);
            for (std::size_t j = 0; j < ny; ++j) Fcol[j] = idi.veYY.at(k, j);
            double_tail_kernel(hy.ys, Fcol, Tv);
            for (std::size_t j = 0; j < ny; ++j) {
                double y = hy.ys[j];
                double u0y = hy.u0.y.at(k, j), h0y = hy.h0.y.at(k, j);
                double veY = idi.veY.at(k, j);
                Ru.at(k, j) = -eps * hy.u0.xx.at(k, j) + se * y * veY * u0y +
                              eps * u0y * Tv[j] - se * y * sg * veY * h0y -
                              eps * h0y * sg * Tv[j];
                Rh.at(k, j) = -eps * hy.h0.xx.at(k, j) + se * y * veY * h0y +
                              eps * h0y * Tv[j] - se * y * sg * veY * u0y -
                              eps * u0y * sg * Tv[j];
                double opu = 1.0 + hy.u0.f.at(k, j), sph = sg + hy.h0.f.at(k, j);
                Rv.at(k, j) = -eps * hy.v0xx.at(k, j) - hy.v0yy.at(k, j) +
                              opu * hy.v0x.at(k, j) + hy.v0.at(k, j) * hy.v0y.at(k, j) -
                              sph * hy.g0x.at(k, j) - hy.g0.at(k, j) * hy.g0y.at(k, j);
            }
        });
    } else {
        const ProfileOrder& L = hy.layer[std::size_t(m - 1)];
        SumLevel S = build_sums(hy, m);
        double em = std::pow(eps, 0.5 * double(m));
        par::parallel_for(std::int64_t(nx), [&](std::int64_t kk) {
            std::size_t k = std::size_t(kk);
            std::vector<double> Fcol(ny), Tv(ny);
            for (std::size_t j = 0; j < ny; ++j) Fcol[j] = idi.veYY.at(k, j);
            double_tail_kernel(hy.ys, Fcol, Tv);
            for (std::size_t j = 0; j < ny; ++j) {
                double y = hy.ys[j];
                double u0y = hy.u0.y.at(k, j), h0y = hy.h0.y.at(k, j);
                double veY = idi.veY.at(k, j);
                double S1 = 0, S2 = 0, S3 = 0, S4 = 0;
                for (int jj = 1; jj <= m; ++jj) {
                    double ej = std::pow(eps, 0.5 * double(jj));
                    const IdealOnGrid& idj = hy.ideal_g[std::size_t(jj - 1)];
                    const ProfileOrder& lj = hy.layer[std::size_t(jj - 1)];
                    double ueYj = idj.vex.at(k, j);
                    S1 += ej * (idj.ue.at(k, j) + lj.u.f.at(k, j));
                    S2 += ej * (sg * idj.ue.at(k, j) + lj.h.f.at(k, j));
                    S3 += ej * (lj.u.y.at(k, j) + se * ueYj);
                    S4 += ej * (lj.h.y.at(k, j) + se * sg * ueYj);
                }
                Ru.at(k, j) =
                    em * (-eps * L.u.xx.at(k, j) + L.u.x.at(k, j) * S1 - L.h.x.at(k, j) * S2 +
                          se * y * veY * u0y + L.v.at(k, j) * S3 - L.g.at(k, j) * S4 -
                          se * y * sg * veY * h0y + eps * u0y * Tv[j] - eps * h0y * sg * Tv[j]);
                Rh.at(k, j) =
                    em * (-eps * L.h.xx.at(k, j) + L.h.x.at(k, j) * S1 - L.u.x.at(k, j) * S2 +
                          se * y * veY * h0y + L.v.at(k, j) * S4 - L.g.at(k, j) * S3 -
                          se * y * sg * veY * u0y + eps * h0y * Tv[j] - eps * u0y * sg * Tv[j]);
                Rv.at(k, j) =
                    em * (-eps * L.vxx.at(k, j) - L.vyy.at(k, j) +
                          S.us_bar.at(k, j) * L.vx.at(k, j) + L.u.f.at(k, j) * S.vsx.at(k, j) +
                          S.vs.at(k, j) * L.vy.at(k, j) + L.v.at(k, j) * S.vs_bar_y.at(k, j) -
                          S.hs_bar.at(k, j) * L.gx.at(k, j) - L.h.f.at(k, j) * S.gsx.at(k, j) -
                          S.gs.at(k, j) * L.gy.at(k, j) - L.g.at(k, j) * S.gs_bar_y.at(k, j));
            }
        });
    }

    // ---- Euler-Prandtl couplings R_E at order i ----
    const double ei = std::pow(eps, 0.5 * double(i));
    const double eim = std::pow(eps, 0.5 * double(i - 1));
    par::parallel_for(std::int64_t(nx), [&](std::int64_t kk) {
        std::size_t k = std::size_t(kk);
        for (std::size_t j = 0; j < ny; ++j) {
            double A1 = hy.u0.x.at(k, j), A2 = hy.h0.x.at(k, j);
            double A3 = hy.v0.at(k, j), A4 = hy.g0.at(k, j);
            double A5 = 0, A6 = 0;
            double A7 = hy.u0.f.at(k, j), A8 = hy.h0.f.at(k, j);
            double A9 = hy.v0y.at(k, j), A10 = hy.g0y.at(k, j);
            double A11 = hy.v0x.at(k, j), A12 = hy.g0x.at(k, j);
            for (int jj = 1; jj <= i - 1; ++jj) {
                double ej = std::pow(eps, 0.5 * double(jj));
                const ProfileOrder& lj = hy.layer[std::size_t(jj - 1)];
                A1 += ej * lj.u.x.at(k, j);
                A2 += ej * lj.h.x.at(k, j);
                A3 += ej * lj.v.at(k, j);
                A4 += ej * lj.g.at(k, j);
                A5 += ej * lj.u.y.at(k, j);
                A6 += ej * lj.h.y.at(k, j);
                A7 += ej * lj.u.f.at(k, j);
                A8 += ej * lj.h.f.at(k, j);
                A9 += ej * lj.vy.at(k, j);
                A10 += ej * lj.gy.at(k, j);
                A11 += ej * lj.vx.at(k, j);
                A12 += ej * lj.gx.at(k, j);
            }
            double ue = idi.ue.at(k, j), ve = idi.ve.at(k, j);
            double uex = -idi.veY.at(k, j), ueY = idi.vex.at(k, j);
            double vex = idi.vex.at(k, j), veY = idi.veY.at(k, j);
            REu.at(k, j) = ei * (ue * A1 - sg * ue * A2 + se * (ueY * A3 - sg * ueY * A4)) +
                           eim * (ve * A5 - sg * ve * A6 + se * (uex * A7 - sg * uex * A8));
            REh.at(k, j) = ei * (ue * A2 - sg * ue * A1 + se * (sg * ueY * A3 - ueY * A4)) +
                           eim * (ve * A6 - sg * ve * A5 + se * (sg * uex * A7 - uex * A8));
            REv.at(k, j) = eim * (ve * A9 - sg * ve * A10 + vex * A7 - sg * vex * A8) +
                           ei * (ue * A11 - sg * ue * A12 + veY * A3 - sg * veY * A4);
        }
    });

    // ---- auxiliary layer pressure and the forcings ----
    F.r_v_prev = Rv;
    F.p_aux = Field2D(hy.xs, hy.ys, Frame::y);
    const double pref = std::pow(eps, 0.5 * (1.0 - double(i)));
    for (std::size_t k = 0; k < nx; ++k) {
        std::vector<double> integrand(ny);
        for (std::size_t j = 0; j < ny; ++j) integrand[j] = Rv.at(k, j) + REv.at(k, j);
        auto T = tail_int(hy.ys, integrand);
        for (std::size_t j = 0; j < ny; ++j) F.p_aux.at(k, j) = pref * T[j];
    }
    F.p_aux_x = d_dx(F.p_aux);

    F.f_u = Field2D(hy.xs, hy.ys, Frame::y);
    F.f_h = Field2D(hy.xs, hy.ys, Frame::y);
    const double inv = std::pow(eps, -0.5 * double(i));
    const double paux_w = std::pow(eps, 0.5 * double(i + 1));
    for (std::size_t q = 0; q < F.f_u.v.size(); ++q) {
        F.f_u.v[q] = -inv * (Ru.v[q] + REu.v[q] + paux_w * F.p_aux_x.v[q]);
        F.f_h.v[q] = -inv * (Rh.v[q] + REh.v[q]);
    }
    return F;
}

ProfileOrder solve_linear_layer(Hierarchy& hy, int i) {
    const bool final_layer = (i == hy.opt.n);
    const double sg = hy.opt.sigma;
    const std::size_t nx = hy.nsta(), ny = hy.ys.size();
    const LayerForcing& F = hy.forcing.at(std::size_t(i - 1));
    const IdealOnGrid& idi = hy.ideal_g.at(std::size_t(i - 1));
    SumLevel S = build_sums(hy, i);

    ProfileOrder P;
    P.order = i;
    P.kind = final_layer ? ProfileOrder::Kind::final_layer : ProfileOrder::Kind::boundary_layer;
    Field2D u(hy.xs, hy.ys, Frame::y), h = u;

    // inflow data: compatibility family pinned to the corrector corner trace
    for (std::size_t j = 0; j + 1 < ny; ++j) {
        double y = hy.ys[j];
        double shape = std::exp(-0.25 * y * y * y * y);
        u.at(0, j) = -idi.ubar[0] * shape;
        h.at(0, j) = -idi.hbar[0] * shape;
    }

    std::vector<double> up(u.row_copy(0)), hp(h.row_copy(0));
    std::vector<Block2> lo(ny), di(ny), ub(ny);
    std::vector<Vec2> rhs(ny);
    std::vector<double> uy(ny), hyv(ny), ux(ny), hx(ny), vv(ny), gg(ny);

    for (std::size_t k = 1; k < nx; ++k) {
        double dx = hy.xs[k] - hy.xs[k - 1];
        std::vector<double> a(ny), b(ny);
        for (std::size_t j = 0; j < ny; ++j) {
            a[j] = 1.0 + hy.u0.f.at(k, j);
            b[j] = sg + hy.h0.f.at(k, j);
            if (a[j] < hy.opt.c0_min)
                throw PositivityError("solve_linear_layer: coefficient floor", a[j], hy.xs[k],
                                      hy.ys[j]);
        }
        std::vector<double> ucur(up), hcur(hp);
        bool done = false;
        for (int it = 0; it < hy.opt.max_inner && !done; ++it) {
            deriv1_line(hy.ys.nodes, ucur, uy);
            deriv1_line(hy.ys.nodes, hcur, hyv);
            for (std::size_t j = 0; j < ny; ++j) {
                ux[j] = (ucur[j] - up[j]) / dx;
                hx[j] = (hcur[j] - hp[j]) / dx;
            }
            if (final_layer) {
                auto vcum = cumtrapz(hy.ys.nodes, ux);
                auto gcum = cumtrapz(hy.ys.nodes, hx);
                for (std::size_t j = 0; j < ny; ++j) {
                    vv[j] = -vcum[j];
                    gg[j] = -gcum[j];
                }
            } else {
                vv = tail_int(hy.ys, ux);
                gg = tail_int(hy.ys, hx);
            }
            double vbar = final_layer ? 0.0 : vv[0];
            double gbar = final_layer ? 0.0 : gg[0];

            for (std::size_t j = 0; j < ny; ++j) {
                if (j == 0 || j == ny - 1) {
                    lo[j] = ub[j] = {0, 0, 0, 0};
                    di[j] = {1, 0, 0, 1};
                    rhs[j] = (j == 0) ? Vec2{-idi.ubar[k], -idi.hbar[k]} : Vec2{0.0, 0.0};
                    continue;
                }
                double hm = hy.ys[j] - hy.ys[j - 1], hp2 = hy.ys[j + 1] - hy.ys[j];
                double c = 2.0 / (hm * hp2 * (hm + hp2));
                lo[j] = {-c * hp2, 0, 0, -c * hp2};
                ub[j] = {-c * hm, 0, 0, -c * hm};
                di[j] = {a[j] / dx + c * (hm + hp2), -b[j] / dx, -b[j] / dx,
                         a[j] / dx + c * (hm + hp2)};

                double Pu = ucur[j] * S.usx.at(k, j) + (vv[j] - vbar) * hy.u0.y.at(k, j) +
                            S.vs.at(k, j) * uy[j] - hcur[j] * S.hsx.at(k, j) -
                            (gg[j] - gbar) * hy.h0.y.at(k, j) - S.gs.at(k, j) * hyv[j];
                double Ph = ucur[j] * S.hsx.at(k, j) + (vv[j] - vbar) * hy.h0.y.at(k, j) +
                            S.vs.at(k, j) * hyv[j] - hcur[j] * S.usx.at(k, j) -
                            (gg[j] - gbar) * hy.u0.y.at(k, j) - S.gs.at(k, j) * uy[j];
                rhs[j] = {a[j] / dx * up[j] - b[j] / dx * hp[j] - Pu + F.f_u.at(k, j),
                          a[j] / dx * hp[j] - b[j] / dx * up[j] - Ph + F.f_h.at(k, j)};
            }
            auto sol = solve_block_tridiagonal(lo, di, ub, rhs);
            double diff = 0.0;
            for (std::size_t j = 0; j < ny; ++j) {
                diff = std::max(diff, std::abs(sol[j][0] - ucur[j]));
                diff = std::max(diff, std::abs(sol[j][1] - hcur[j]));
                ucur[j] = sol[j][0];
                hcur[j] = sol[j][1];
            }
            if (diff < hy.opt.tol_inner * (1.0 + linf_norm(ucur))) done = true;
        }
        if (!done)
            throw DivergenceError("solve_linear_layer: inner iteration stalled at x = " +
                                  std::to_string(hy.xs[k]));
        for (std::size_t j = 0; j < ny; ++j) {
            u.at(k, j) = ucur[j];
            h.at(k, j) = hcur[j];
        }
        up = ucur;
        hp = hcur;
    }

    P.u = DerivSet::of(u);
    P.h = DerivSet::of(h);

    // vertical components from centered x-derivatives of the stored fields
    P.v = Field2D(hy.xs, hy.ys, Frame::y);
    P.g = Field2D(hy.xs, hy.ys, Frame::y);
    for (std::size_t k = 0; k < nx; ++k) {
        std::vector<double> uxr(P.u.x.row(k), P.u.x.row(k) + ny);
        std::vector<double> hxr(P.h.x.row(k), P.h.x.row(k) + ny);
        if (final_layer) {
            auto vcum = cumtrapz(hy.ys.nodes, uxr);
            auto gcum = cumtrapz(hy.ys.nodes, hxr);
            for (std::size_t j = 0; j < ny; ++j) {
                P.v.at(k, j) = -vcum[j];
                P.g.at(k, j) = -gcum[j];
            }
        } else {
            auto T = tail_int(hy.ys, uxr);
            auto Tg = tail_int(hy.ys, hxr);
            for (std::size_t j = 0; j < ny; ++j) {
                P.v.at(k, j) = T[j];
                P.g.at(k, j) = Tg[j];
            }
        }
    }
    P.vx = d_dx(P.v);
    P.vy = d_dy(P.v);
    P.vxx = d2_dx2(P.v);
    P.vyy = d2_dy2(P.v);
    P.gx = d_dx(P.g);
    P.gy = d_dy(P.g);
    P.gxx = d2_dx2(P.g);
    P.gyy = d2_dy2(P.g);
    return P;
}

void add_layer_order(Hierarchy& hy, int i) {
    if (std::size_t(i) != hy.layer.size() + 1)
        throw DependencyError("add_layer_order: orders must be built in sequence");
    add_ideal_order(hy, i);
    hy.forcing.push_back(assemble_forcing(hy, i));
    hy.layer.push_back(solve_linear_layer(hy, i));
}

void apply_cutoff(Hierarchy& hy) {
    const int n = hy.opt.n;
    if (hy.layer.size() != std::size_t(n))
        throw DependencyError("apply_cutoff: final layer not built");
    const double eps = hy.opt.eps, se = std::sqrt(eps), sg = hy.opt.sigma;
    const std::size_t nx = hy.nsta(), ny = hy.ys.size();
    if (hy.ys.back() < std::sqrt(hy.opt.x_max / eps))
        throw CoverageError("apply_cutoff: y range does not cover the cut-off support");
    const ProfileOrder& L = hy.layer.back();
    const LayerForcing& F = hy.forcing.back();

    auto sfun = [&](std::size_t k, std::size_t j) {
        return se * hy.ys[j] / std::sqrt(hy.xs[k]);
    };

    ProfileOrder T;
    T.order = n;
    T.kind = ProfileOrder::Kind::final_cutoff;
    Field2D vt(hy.xs, hy.ys, Frame::y), gt = vt, ut = vt, ht = vt;
    for (std::size_t k = 0; k < nx; ++k)
        for (std::size_t j = 0; j < ny; ++j) {
            double c = cutoff_chi(sfun(k, j));
            vt.at(k, j) = c * L.v.at(k, j);
            gt.at(k, j) = c * L.g.at(k, j);
        }

    // u~ = int_x^inf d_y[chi v] dtheta, rowwise over stations. Past the last
    // station the integral is closed exactly on plateau rows (there the tail
    // telescopes to u^n itself) and by a frozen-power continuation of the last
    // slice where the cut-off support crosses the outflow edge.
    const double xe = hy.xs.back();
    const double sn = sigma_schedule(n, n);
    par::parallel_for(std::int64_t(ny), [&](std::int64_t jj) {
        std::size_t j = std::size_t(jj);
        double y = hy.ys[j];
        std::vector<double> Au(nx), Ah(nx);
        for (std::size_t k = 0; k < nx; ++k) {
            double th = hy.xs[k];
            double s = se * y / std::sqrt(th);
            double chi = cutoff_chi(s), chiy = cutoff_chi_d1(s) * se / std::sqrt(th);
            Au[k] = chiy * L.v.at(k, j) + chi * L.vy.at(k, j);
            Ah[k] = chiy * L.g.at(k, j) + chi * L.gy.at(k, j);
        }
        double ua, ha;
        if (se * y / std::sqrt(xe) <= 0.5) {
            ua = L.u.f.at(nx - 1, j);
            ha = L.h.f.at(nx - 1, j);
        } else {
            // continuation with frozen slices: v ~ (th/xe)^(-1+sn) etc.
            double rho_v = -1.0 + sn, rho_vy = -1.5 + sn;
            double v0v = L.v.at(nx - 1, j), g0v = L.g.at(nx - 1, j);
            double vy0 = L.vy.at(nx - 1, j), gy0 = L.gy.at(nx - 1, j);
            double th_end = std::max(1.5 * 4.0 * eps * y * y, 2.0 * xe);
            double thp = xe, fup, fhp;
            auto eval = [&](double th, double& fu, double& fh) {
                double s = se * y / std::sqrt(th);
                double chi = cutoff_chi(s), chiy = cutoff_chi_d1(s) * se / std::sqrt(th);
                double sc_v = std::pow(th / xe, rho_v), sc_vy = std::pow(th / xe, rho_vy);
                fu = chiy * v0v * sc_v + chi * vy0 * sc_vy;
                fh = chiy * g0v * sc_v + chi * gy0 * sc_vy;
            };
            eval(xe, fup, fhp);
            ua = ha = 0.0;
            while (thp < th_end) {
                double thn = thp * 1.03;
                double fun, fhn;
                eval(thn, fun, fhn);
                ua += 0.5 * (fup + fun) * (thn - thp);
                ha += 0.5 * (fhp + fhn) * (thn - thp);
                thp = thn;
                fup = fun;
                fhp = fhn;
            }
            // pure plateau beyond: chi = 1, integrate the power law
            ua += -vy0 * std::pow(thp / xe, rho_vy) * thp / (rho_vy + 1.0);
            ha += -gy0 * std::pow(thp / xe, rho_vy) * thp / (rho_vy + 1.0);
        }
        ut.at(nx - 1, j) = ua;
        ht.at(nx - 1, j) = ha;
        for (std::size_t k = nx - 1; k-- > 0;) {
            ua += 0.5 * (Au[k] + Au[k + 1]) * (hy.xs[k + 1] - hy.xs[k]);
            ha += 0.5 * (Ah[k] + Ah[k + 1]) * (hy.xs[k + 1] - hy.xs[k]);
            ut.at(k, j) = ua;
            ht.at(k, j) = ha;
        }
    });
    // the wall row telescopes exactly to the corrector trace
    for (std::size_t k = 0; k < nx; ++k) {
        ut.at(k, 0) = -hy.ideal_g[std::size_t(n - 1)].ubar[k];
        ht.at(k, 0) = -hy.ideal_g[std::size_t(n - 1)].hbar[k];
    }

    T.u = DerivSet::of(ut);
    T.h = DerivSet::of(ht);
    T.v = vt;
    T.g = gt;
    T.vx = d_dx(vt);
    T.vy = d_dy(vt);
    T.vxx = d2_dx2(vt);
    T.vyy = d2_dy2(vt);
    T.gx = d_dx(gt);
    T.gy = d_dy(gt);
    T.gxx = d2_dx2(gt);
    T.gyy = d2_dy2(gt);
    hy.tilde = std::move(T);

    // cut-off error terms E_u^{(n)}, E_h^{(n)}
    SumLevel S = build_sums(hy, n);
    hy.E_u = Field2D(hy.xs, hy.ys, Frame::y);
    hy.E_h = Field2D(hy.xs, hy.ys, Frame::y);
    par::parallel_for(std::int64_t(ny), [&](std::int64_t jj) {
        std::size_t j = std::size_t(jj);
        double y = hy.ys[j];
        std::vector<double> I1(nx, 0), I2(nx, 0), I3(nx, 0), I4(nx, 0), I5u(nx, 0), I5h(nx, 0);
        auto accum = [&](std::vector<double>& I, auto&& f) {
            double acc = 0.0;
            double fprev = f(nx - 1);
            I[nx - 1] = 0.0;
            for (std::size_t k = nx - 1; k-- > 0;) {
                double fcur = f(k);
                acc += 0.5 * (fcur + fprev) * (hy.xs[k + 1] - hy.xs[k]);
                I[k] = acc;
                fprev = fcur;
            }
        };
        auto chi1 = [&](std::size_t k) { return cutoff_chi_d1(sfun(k, j)); };
        auto chi2 = [&](std::size_t k) { return cutoff_chi_d2(sfun(k, j)); };
        auto chi3 = [&](std::size_t k) { return cutoff_chi_d3(sfun(k, j)); };
        accum(I1, [&](std::size_t k) {
            double th = hy.xs[k];
            return std::sqrt(eps / th) * chi1(k) * L.v.at(k, j) +
                   chi1(k) * se * y / (th * std::sqrt(th)) * L.u.f.at(k, j);
        });
        accum(I2, [&](std::size_t k) {
            double th = hy.xs[k], z = y / std::sqrt(th);
            return eps / th * chi2(k) * L.v.at(k, j) +
                   2.0 * std::sqrt(eps / th) * chi1(k) * L.vy.at(k, j) -
                   std::sqrt(eps / th) * chi1(k) * z * L.u.y.at(k, j);
        });
        accum(I3, [&](std::size_t k) {
            double th = hy.xs[k];
            return std::sqrt(eps / th) * chi1(k) * L.g.at(k, j) +
                   chi1(k) * se * y / (th * std::sqrt(th)) * L.h.f.at(k, j);
        });
        accum(I4, [&](std::size_t k) {
            double th = hy.xs[k], z = y / std::sqrt(th);
            return eps / th * chi2(k) * L.g.at(k, j) +
                   2.0 * std::sqrt(eps / th) * chi1(k) * L.gy.at(k, j) -
                   std::sqrt(eps / th) * chi1(k) * z * L.h.y.at(k, j);
        });
        accum(I5u, [&](std::size_t k) {
            double th = hy.xs[k], z = y / std::sqrt(th);
            return se / th * chi1(k) * 0.5 * z * L.u.yy.at(k, j) -
                   3.0 * eps / th * chi2(k) * L.vy.at(k, j) -
                   3.0 * std::sqrt(eps / th) * chi1(k) * L.vyy.at(k, j) -
                   std::pow(eps / th, 1.5) * chi3(k) * L.v.at(k, j);
        });
        accum(I5h, [&](std::size_t k) {
            double th = hy.xs[k], z = y / std::sqrt(th);
            return se / th * chi1(k) * 0.5 * z * L.h.yy.at(k, j) -
                   3.0 * eps / th * chi2(k) * L.gy.at(k, j) -
                   3.0 * std::sqrt(eps / th) * chi1(k) * L.gyy.at(k, j) -
                   std::pow(eps / th, 1.5) * chi3(k) * L.g.at(k, j);
        });
        for (std::size_t k = 0; k < nx; ++k) {
            double x = hy.xs[k];
            double opu = 1.0 + hy.u0.f.at(k, j), sph = sg + hy.h0.f.at(k, j);
            double sc = std::sqrt(eps / x);
            double c1 = cutoff_chi_d1(sfun(k, j));
            double Et_u = -opu * sc * c1 * L.v.at(k, j) + S.usx.at(k, j) * I1[k] +
                          S.vs.at(k, j) * I2[k] + sph * sc * c1 * L.g.at(k, j) -
                          S.hsx.at(k, j) * I3[k] - S.gs.at(k, j) * I4[k] - I5u[k];
            double Et_h = -opu * sc * c1 * L.g.at(k, j) + S.hsx.at(k, j) * I1[k] +
                          S.vs.at(k, j) * I4[k] + sph * sc * c1 * L.v.at(k, j) -
                          S.usx.at(k, j) * I3[k] - S.gs.at(k, j) * I2[k] - I5h[k];
            double chim1 = cutoff_chi(sfun(k, j)) - 1.0;
            hy.E_u.at(k, j) = chim1 * F.f_u.at(k, j) + Et_u;
            hy.E_h.at(k, j) = chim1 * F.f_h.at(k, j) + Et_h;
        }
    });
}

Hierarchy build_hierarchy(const SelfSimilarProfiles& ss, const LeadingLayer& lead,
                          const HierarchyOptions& opt) {
    Hierarchy hy = begin_hierarchy(ss, lead, opt);
    for (int i = 1; i <= opt.n; ++i) add_layer_order(hy, i);
    apply_cutoff(hy);
    return hy;
}

}  // namespace pmhd
