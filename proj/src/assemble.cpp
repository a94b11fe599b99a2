#include "pmhd/assemble.hpp"

#include <cmath>

#include "pmhd/errors.hpp"
#include "pmhd/parallel.hpp"
#include "pmhd/quadrature.hpp"
#include "pmhd/ratefit.hpp"

namespace pmhd {

namespace {

const ProfileOrder& order_field(const Hierarchy& hy, int j) {
    // the cut final layer stands in for order n
    if (j == hy.opt.n && hy.tilde) return *hy.tilde;
    return hy.layer.at(std::size_t(j - 1));
}

}  // namespace

Field2D resample_field(const Field2D& src, const Grid1D& xs, const Grid1D& ys,
                       bool zero_beyond) {
    Field2D out(xs, ys, Frame::y);
    const auto& sx = src.xs.nodes;
    par::parallel_for(std::int64_t(xs.size()), [&](std::int64_t ii) {
        std::size_t i = std::size_t(ii);
        double x = std::clamp(xs[i], sx.front(), sx.back());
        auto it = std::upper_bound(sx.begin(), sx.end(), x);
        std::size_t k = std::min<std::size_t>(std::size_t(it - sx.begin()), sx.size() - 1);
        std::size_t k0 = (k == 0) ? 0 : k - 1;
        std::size_t k1 = std::min(k0 + 1, sx.size() - 1);
        double t = (k1 == k0) ? 0.0 : (x - sx[k0]) / (sx[k1] - sx[k0]);
        Pchip r0(src.ys.nodes, src.row_copy(k0), zero_beyond);
        Pchip r1(src.ys.nodes, src.row_copy(k1), zero_beyond);
        for (std::size_t j = 0; j < ys.size(); ++j)
            out.at(i, j) = (1.0 - t) * r0.eval(ys[j]) + t * r1.eval(ys[j]);
    });
    return out;
}

ApproxSolution build_approximate(const Hierarchy& hy) {
    const double eps = hy.opt.eps, sg = hy.opt.sigma, se = std::sqrt(eps);
    const int n = hy.opt.n;
    if (!hy.tilde) throw DependencyError("build_approximate: cut-off stage missing");
    ApproxSolution A;
    Field2D zero(hy.xs, hy.ys, Frame::y);
    A.u = zero; A.v = zero; A.h = zero; A.g = zero; A.p = zero;
    const std::size_t N = zero.v.size();
    for (std::size_t q = 0; q < N; ++q) {
        A.u.v[q] = 1.0 + hy.u0.f.v[q];
        A.v.v[q] = hy.v0.v[q];
        A.h.v[q] = sg + hy.h0.f.v[q];
        A.g.v[q] = hy.g0.v[q];
    }
    for (int j = 1; j <= n; ++j) {
        double ej = std::pow(eps, 0.5 * double(j));
        double ejm = std::pow(eps, 0.5 * double(j - 1));
        const IdealOnGrid& id = hy.ideal_g[std::size_t(j - 1)];
        const ProfileOrder& L = order_field(hy, j);
        // p_e^{j,a} on the layer grid from the sampled ideal fields
        for (std::size_t q = 0; q < N; ++q) {
            double ue = id.ue.v[q], ve = id.ve.v[q];
            A.u.v[q] += ej * (ue + L.u.f.v[q]);
            A.h.v[q] += ej * (sg * ue + L.h.f.v[q]);
            A.v.v[q] += ejm * (ve + se * L.v.v[q]);
            A.g.v[q] += ejm * (sg * ve + se * L.g.v[q]);
            double pe = -(1.0 - sg * sg) * ue;
            double pea = 0.5 * (ue * ue + ve * ve);
            for (int l = 1; l < j; ++l) {
                const IdealOnGrid& idl = hy.ideal_g[std::size_t(l - 1)];
                pea += std::pow(eps, 0.5 * double(l - j)) *
                       (ue * idl.ue.v[q] + ve * idl.ve.v[q]);
            }
            pea *= -(1.0 - sg * sg);
            A.p.v[q] += ej * (pe + ej * pea) + ej * se * hy.forcing[std::size_t(j - 1)].p_aux.v[q];
        }
    }
    return A;
}

ApproxSolution build_approximate_on(const Hierarchy& hy, const Grid1D& xs, const Grid1D& ys) {
    const double eps = hy.opt.eps, sg = hy.opt.sigma, se = std::sqrt(eps);
    const int n = hy.opt.n;
    if (!hy.tilde) throw DependencyError("build_approximate_on: cut-off stage missing");
    if (xs.back() > hy.xs.back() * (1 + 1e-12) || ys.back() > hy.ys.back() * (1 + 1e-12))
        throw CoverageError("build_approximate_on: target grid outside coverage");
    ApproxSolution A;
    A.u = resample_field(hy.u0.f, xs, ys);
    A.v = resample_field(hy.v0, xs, ys);
    A.h = resample_field(hy.h0.f, xs, ys);
    A.g = resample_field(hy.g0, xs, ys);
    A.p = Field2D(xs, ys, Frame::y);
    for (std::size_t q = 0; q < A.u.v.size(); ++q) {
        A.u.v[q] += 1.0;
        A.h.v[q] += sg;
    }
    for (int j = 1; j <= n; ++j) {
        double ej = std::pow(eps, 0.5 * double(j));
        double ejm = std::pow(eps, 0.5 * double(j - 1));
        const ProfileOrder& L = order_field(hy, j);
        Field2D up = resample_field(L.u.f, xs, ys), hp = resample_field(L.h.f, xs, ys);
        Field2D vp = resample_field(L.v, xs, ys, false), gp = resample_field(L.g, xs, ys, false);
        const IdealCorrector& c = hy.ideal[std::size_t(j - 1)];
        CorrectorEval ue_ev(c.xs, c.Ys, c.u), ve_ev(c.xs, c.Ys, c.v);
        std::vector<CorrectorEval> lower_u, lower_v;
        for (int l = 1; l < j; ++l) {
            lower_u.emplace_back(hy.ideal[std::size_t(l - 1)].xs, hy.ideal[std::size_t(l - 1)].Ys,
                                 hy.ideal[std::size_t(l - 1)].u);
            lower_v.emplace_back(hy.ideal[std::size_t(l - 1)].xs, hy.ideal[std::size_t(l - 1)].Ys,
                                 hy.ideal[std::size_t(l - 1)].v);
        }
        Field2D paux = resample_field(hy.forcing[std::size_t(j - 1)].p_aux, xs, ys, false);
        par::parallel_for(std::int64_t(xs.size()), [&](std::int64_t ii) {
            std::size_t i = std::size_t(ii);
            for (std::size_t jj = 0; jj < ys.size(); ++jj) {
                double Y = se * ys[jj];
                double ue = ue_ev(xs[i], Y), ve = ve_ev(xs[i], Y);
                A.u.at(i, jj) += ej * (ue + up.at(i, jj));
                A.h.at(i, jj) += ej * (sg * ue + hp.at(i, jj));
                A.v.at(i, jj) += ejm * (ve + se * vp.at(i, jj));
                A.g.at(i, jj) += ejm * (sg * ve + se * gp.at(i, jj));
                double pe = -(1.0 - sg * sg) * ue;
                double pea = 0.5 * (ue * ue + ve * ve);
                for (int l = 1; l < j; ++l)
                    pea += std::pow(eps, 0.5 * double(l - j)) *
                           (ue * lower_u[std::size_t(l - 1)](xs[i], Y) +
                            ve * lower_v[std::size_t(l - 1)](xs[i], Y));
                pea *= -(1.0 - sg * sg);
                A.p.at(i, jj) += ej * (pe + ej * pea) + ej * se * paux.at(i, jj);
            }
        });
    }
    return A;
}

namespace {

struct SumsN {
    Field2D us_bar, hs_bar, vs, gs, vsx, gsx, vs_bar_y, gs_bar_y, usx, hsx;
};

// partial sums at level n with the cut final layer standing in for order n
SumsN sums_for_residual(const Hierarchy& hy) {
    const double eps = hy.opt.eps, sg = hy.opt.sigma, se = std::sqrt(eps);
    const int n = hy.opt.n;
    SumsN S;
    Field2D zero(hy.xs, hy.ys, Frame::y);
    S.us_bar = zero; S.hs_bar = zero; S.vs = zero; S.gs = zero;
    S.vsx = zero; S.gsx = zero; S.vs_bar_y = zero; S.gs_bar_y = zero;
    S.usx = zero; S.hsx = zero;
    const std::size_t N = zero.v.size();
    for (std::size_t q = 0; q < N; ++q) {
        S.us_bar.v[q] = 1.0 + hy.u0.f.v[q];
        S.hs_bar.v[q] = sg + hy.h0.f.v[q];
        S.vs.v[q] = hy.v0.v[q];
        S.gs.v[q] = hy.g0.v[q];
        S.vsx.v[q] = hy.v0x.v[q];
        S.gsx.v[q] = hy.g0x.v[q];
        S.vs_bar_y.v[q] = hy.v0y.v[q];
        S.gs_bar_y.v[q] = hy.g0y.v[q];
        S.usx.v[q] = hy.u0.x.v[q];
        S.hsx.v[q] = hy.h0.x.v[q];
    }
    for (int j = 1; j <= n; ++j) {
        double ej = std::pow(eps, 0.5 * double(j));
        double ejm = std::pow(eps, 0.5 * double(j - 1));
        const IdealOnGrid& id = hy.ideal_g[std::size_t(j - 1)];
        const ProfileOrder& L = order_field(hy, j);
        for (std::size_t q = 0; q < N; ++q) {
            double ue = id.ue.v[q], ve = id.ve.v[q], uex = -id.veY.v[q];
            S.us_bar.v[q] += ej * (ue + L.u.f.v[q]);
            S.hs_bar.v[q] += ej * (sg * ue + L.h.f.v[q]);
            S.usx.v[q] += ej * (uex + (j < n ? L.u.x.v[q] : 0.0));
            S.hsx.v[q] += ej * (sg * uex + (j < n ? L.h.x.v[q] : 0.0));
            S.vs.v[q] += ejm * ve + (j < n ? ej * L.v.v[q] : 0.0);
            S.gs.v[q] += ejm * sg * ve + (j < n ? ej * L.g.v[q] : 0.0);
            S.vsx.v[q] += ejm * id.vex.v[q] + (j < n ? ej * L.vx.v[q] : 0.0);
            S.gsx.v[q] += ejm * sg * id.vex.v[q] + (j < n ? ej * L.gx.v[q] : 0.0);
            S.vs_bar_y.v[q] += ejm * se * id.veY.v[q] + ej * L.vy.v[q];
            S.gs_bar_y.v[q] += ejm * se * sg * id.veY.v[q] + ej * L.gy.v[q];
        }
    }
    return S;
}

}  // namespace

ResidualSet compute_residuals(const Hierarchy& hy, ResidualRoute route) {
    if (!hy.tilde) throw DependencyError("compute_residuals: cut-off stage missing");
    const double eps = hy.opt.eps, sg = hy.opt.sigma, se = std::sqrt(eps);
    const int n = hy.opt.n;
    const std::size_t nx = hy.nsta(), ny = hy.ys.size();
    ResidualSet R;
    R.route = route;
    Field2D zero(hy.xs, hy.ys, Frame::y);
    R.R_u = zero; R.R_v = zero; R.R_h = zero; R.R_g = zero;

    if (route == ResidualRoute::operator_route) {
        ApproxSolution A = build_approximate(hy);
        DerivSet u = DerivSet::of(A.u), v = DerivSet::of(A.v), h = DerivSet::of(A.h),
                 g = DerivSet::of(A.g);
        Field2D px = d_dx(A.p), py = d_dy(A.p);
        for (std::size_t q = 0; q < zero.v.size(); ++q) {
            double conv_u = A.u.v[q] * u.x.v[q] + A.v.v[q] * u.y.v[q];
            double mag_u = A.h.v[q] * h.x.v[q] + A.g.v[q] * h.y.v[q];
            R.R_u.v[q] = -(eps * u.xx.v[q] + u.yy.v[q]) + conv_u - mag_u + px.v[q];
            double conv_v = A.u.v[q] * v.x.v[q] + A.v.v[q] * v.y.v[q];
            double mag_v = A.h.v[q] * g.x.v[q] + A.g.v[q] * g.y.v[q];
            R.R_v.v[q] = -(eps * v.xx.v[q] + v.yy.v[q]) + conv_v - mag_v + py.v[q] / eps;
            double conv_h = A.u.v[q] * h.x.v[q] + A.v.v[q] * h.y.v[q];
            double mag_h = A.h.v[q] * u.x.v[q] + A.g.v[q] * u.y.v[q];
            R.R_h.v[q] = -(eps * h.xx.v[q] + h.yy.v[q]) + conv_h - mag_h;
            double conv_g = A.u.v[q] * g.x.v[q] + A.v.v[q] * g.y.v[q];
            double mag_g = A.h.v[q] * v.x.v[q] + A.g.v[q] * v.y.v[q];
            R.R_g.v[q] = -(eps * g.xx.v[q] + g.yy.v[q]) + conv_g - mag_g;
        }
        return R;
    }

    // formula route
    const ProfileOrder& T = *hy.tilde;
    const IdealOnGrid& idn = hy.ideal_g[std::size_t(n - 1)];
    SumsN S = sums_for_residual(hy);
    const double en = std::pow(eps, 0.5 * double(n));
    const double enm = std::pow(eps, 0.5 * double(n - 1));

    par::parallel_for(std::int64_t(nx), [&](std::int64_t kk) {
        std::size_t k = std::size_t(kk);
        for (std::size_t j = 0; j < ny; ++j) {
            double S1 = 0, S2 = 0, S3 = 0, S4 = 0;
            for (int l = 1; l <= n; ++l) {
                double el = std::pow(eps, 0.5 * double(l));
                const IdealOnGrid& idl = hy.ideal_g[std::size_t(l - 1)];
                const ProfileOrder& Ll = order_field(hy, l);
                double ueYl = idl.vex.at(k, j);
                S1 += el * (idl.ue.at(k, j) + Ll.u.f.at(k, j));
                S2 += el * (sg * idl.ue.at(k, j) + Ll.h.f.at(k, j));
                S3 += el * (Ll.u.y.at(k, j) + se * ueYl);
                S4 += el * (Ll.h.y.at(k, j) + se * sg * ueYl);
            }
            R.R_u.at(k, j) = en * (-eps * T.u.xx.at(k, j) + T.u.x.at(k, j) * S1 -
                                   T.h.x.at(k, j) * S2 + T.v.at(k, j) * S3 -
                                   T.g.at(k, j) * S4 + hy.E_u.at(k, j));
            R.R_h.at(k, j) = en * (-eps * T.h.xx.at(k, j) + T.h.x.at(k, j) * S1 -
                                   T.u.x.at(k, j) * S2 + T.v.at(k, j) * S4 -
                                   T.g.at(k, j) * S3 + hy.E_h.at(k, j));
            R.R_v.at(k, j) =
                en * (-(eps * T.vxx.at(k, j) + T.vyy.at(k, j)) +
                      S.us_bar.at(k, j) * T.vx.at(k, j) + T.u.f.at(k, j) * S.vsx.at(k, j) +
                      S.vs.at(k, j) * T.vy.at(k, j) + T.v.at(k, j) * S.vs_bar_y.at(k, j) -
                      S.hs_bar.at(k, j) * T.gx.at(k, j) - T.h.f.at(k, j) * S.gsx.at(k, j) -
                      S.gs.at(k, j) * T.gy.at(k, j) - T.g.at(k, j) * S.gs_bar_y.at(k, j));
            R.R_g.at(k, j) =
                en * (-(eps * T.gxx.at(k, j) + T.gyy.at(k, j)) +
                      S.us_bar.at(k, j) * T.gx.at(k, j) + T.u.f.at(k, j) * S.gsx.at(k, j) +
                      S.vs.at(k, j) * T.gy.at(k, j) + T.v.at(k, j) * S.gs_bar_y.at(k, j) -
                      S.hs_bar.at(k, j) * T.vx.at(k, j) - T.h.f.at(k, j) * S.vsx.at(k, j) -
                      S.gs.at(k, j) * T.vy.at(k, j) - T.g.at(k, j) * S.vs_bar_y.at(k, j));
        }
    });

    // R^{g,n-1} + R_E^{g,n} complete the vertical magnetic remainder
    {
        const int m = n - 1;
        const ProfileOrder& L = hy.layer.at(std::size_t(m - 1));
        const IdealOnGrid& idm1 = hy.ideal_g.at(std::size_t(m));  // order m+1 = n
        double em = std::pow(eps, 0.5 * double(m));
        par::parallel_for(std::int64_t(nx), [&](std::int64_t kk) {
            std::size_t k = std::size_t(kk);
            std::vector<double> Fcol(ny), Tv(ny), Hg(ny), Hv(ny);
            for (std::size_t j = 0; j < ny; ++j) Fcol[j] = idm1.veYY.at(k, j);
            {
                auto W = cumtrapz(hy.ys.nodes, Fcol);
                auto IW = cumtrapz(hy.ys.nodes, W);
                for (std::size_t j = 0; j < ny; ++j) Tv[j] = IW[j] - hy.ys[j] * W[j];
            }
            {
                std::vector<double> xv(ny);
                for (std::size_t j = 0; j < ny; ++j) xv[j] = idm1.vexY.at(k, j);
                auto cum = cumtrapz(hy.ys.nodes, xv);
                for (std::size_t j = 0; j < ny; ++j) {
                    Hv[j] = cum[j];
                    Hg[j] = sg * cum[j];
                }
            }
            for (std::size_t j = 0; j < ny; ++j) {
                double y = hy.ys[j];
                double veY = idm1.veY.at(k, j);
                double S1 = 0, S2 = 0, S5 = 0, S6 = 0;
                for (int l = 1; l <= m; ++l) {
                    double el = std::pow(eps, 0.5 * double(l));
                    const IdealOnGrid& idl = hy.ideal_g[std::size_t(l - 1)];
                    const ProfileOrder& Ll = hy.layer[std::size_t(l - 1)];
                    S1 += el * (idl.ue.at(k, j) + Ll.u.f.at(k, j));
                    S2 += el * (sg * idl.ue.at(k, j) + Ll.h.f.at(k, j));
                    S5 += el * (Ll.gy.at(k, j) + sg * idl.veY.at(k, j));
                    S6 += el * (Ll.vy.at(k, j) + idl.veY.at(k, j));
                }
                double Rg_m =
                    em * (-eps * L.gxx.at(k, j) + L.gx.at(k, j) * S1 - L.vx.at(k, j) * S2 +
                          se * y * veY * hy.g0y.at(k, j) + L.v.at(k, j) * S5 -
                          L.g.at(k, j) * S6 - se * y * sg * veY * hy.v0y.at(k, j) +
                          eps * hy.g0y.at(k, j) * Tv[j] - eps * hy.v0y.at(k, j) * sg * Tv[j] +
                          se * hy.u0.f.at(k, j) * Hg[j] - se * hy.h0.f.at(k, j) * Hv[j]);
                // R_E^{g,n}
                double B1 = hy.g0x.at(k, j), B2 = hy.v0x.at(k, j);
                double B3 = hy.v0.at(k, j), B4 = hy.g0.at(k, j);
                double B5 = 0, B6 = 0;
                double B7 = hy.u0.f.at(k, j), B8 = hy.h0.f.at(k, j);
                for (int l = 1; l <= n - 1; ++l) {
                    double el = std::pow(eps, 0.5 * double(l));
                    const ProfileOrder& Ll = hy.layer[std::size_t(l - 1)];
                    B1 += el * Ll.gx.at(k, j);
                    B2 += el * Ll.vx.at(k, j);
                    B3 += el * Ll.v.at(k, j);
                    B4 += el * Ll.g.at(k, j);
                    B5 += el * Ll.gy.at(k, j);
                    B6 += el * Ll.vy.at(k, j);
                    B7 += el * Ll.u.f.at(k, j);
                    B8 += el * Ll.h.f.at(k, j);
                }
                double uen = idn.ue.at(k, j), ven = idn.ve.at(k, j);
                double vexn = idn.vex.at(k, j), veYn = idn.veY.at(k, j);
                double REg = en * (uen * B1 - sg * uen * B2 + sg * veYn * B3 - veYn * B4) +
                             enm * (ven * B5 - sg * ven * B6 + sg * vexn * B7 - vexn * B8);
                R.R_g.at(k, j) += Rg_m + REg;
            }
        });
    }
    return R;
}

Field2D residual_discretization_estimate(const Hierarchy& hy) {
    const double eps = hy.opt.eps, sg = hy.opt.sigma;
    const int n = hy.opt.n;
    const std::size_t nx = hy.nsta(), ny = hy.ys.size();
    Field2D est(hy.xs, hy.ys, Frame::y);

    // leading-order equations evaluated with this grid's differences
    std::vector<double> vbar(nx), gbar(nx);
    for (std::size_t k = 0; k < nx; ++k) {
        vbar[k] = -hy.v0.at(k, 0);
        gbar[k] = sg * vbar[k];
    }
    for (std::size_t k = 0; k < nx; ++k)
        for (std::size_t j = 0; j < ny; ++j) {
            double opu = 1.0 + hy.u0.f.at(k, j), sph = sg + hy.h0.f.at(k, j);
            double vt = hy.v0.at(k, j) + vbar[k], gt = hy.g0.at(k, j) + gbar[k];
            double r_u = opu * hy.u0.x.at(k, j) + vt * hy.u0.y.at(k, j) -
                         sph * hy.h0.x.at(k, j) - gt * hy.h0.y.at(k, j) - hy.u0.yy.at(k, j);
            double r_h = opu * hy.h0.x.at(k, j) + vt * hy.h0.y.at(k, j) -
                         sph * hy.u0.x.at(k, j) - gt * hy.u0.y.at(k, j) - hy.h0.yy.at(k, j);
            est.at(k, j) = std::abs(r_u) + std::abs(r_h);
        }

    // layer equations (uncut order n: that is what the march satisfied)
    for (int i = 1; i <= n; ++i) {
        const ProfileOrder& L = hy.layer[std::size_t(i - 1)];
        const LayerForcing& F = hy.forcing[std::size_t(i - 1)];
        double ei = std::pow(eps, 0.5 * double(i));
        bool fin = (i == n);
        for (std::size_t k = 0; k < nx; ++k) {
            double vb = fin ? 0.0 : L.v.at(k, 0);
            double gb = fin ? 0.0 : L.g.at(k, 0);
            for (std::size_t j = 0; j < ny; ++j) {
                double opu = 1.0 + hy.u0.f.at(k, j), sph = sg + hy.h0.f.at(k, j);
                double r = -L.u.yy.at(k, j) + opu * L.u.x.at(k, j) - sph * L.h.x.at(k, j) -
                           F.f_u.at(k, j);
                // convective functionals from the stored level sums would repeat
                // the forcing assembly; the dominant inconsistency is the
                // backward-Euler x-derivative, so the P-terms are folded into a
                // coefficient-scale bound
                double pscale = std::abs(L.u.f.at(k, j)) + std::abs(L.h.f.at(k, j)) +
                                std::abs(L.v.at(k, j) - vb) + std::abs(L.g.at(k, j) - gb);
                est.at(k, j) += ei * (std::abs(r) + 0.2 * pscale);
            }
        }
    }
    return est;
}

std::vector<SummaryRow> verify_summary(const Hierarchy& hy) {
    const double eps = hy.opt.eps, sg = hy.opt.sigma, dl = hy.opt.delta, se = std::sqrt(eps);
    const int n = hy.opt.n;
    const std::size_t nx = hy.nsta(), ny = hy.ys.size();
    std::vector<SummaryRow> rows;

    auto station_sup = [&](auto&& f) {
        std::vector<double> s(nx, 0.0);
        for (std::size_t k = 0; k < nx; ++k)
            for (std::size_t j = 0; j < ny; ++j) s[k] = std::max(s[k], std::abs(f(k, j)));
        return s;
    };
    auto add_bounded = [&](const std::string& id, const std::string& q,
                           std::vector<double> sup, double smallness = -1.0) {
        SummaryRow r;
        r.claim_id = id;
        r.quantity = q;
        double floor = 0.0;
        for (double v : sup) floor = std::max(floor, v);
        if (floor <= 1e-14) {
            r.measured = 0.0;
            r.claimed = 0.0;
            r.tolerance = 0.2;
            r.pass = true;
            rows.push_back(r);
            return;
        }
        for (auto& v : sup) v = std::max(v, 1e-300);
        auto fit = fit_decay_rate(hy.xs.nodes, sup);
        r.measured = fit.exponent;
        r.claimed = 0.0;  // bounded: no growth
        r.tolerance = 0.2;
        r.pass = fit.exponent <= 0.2;
        if (smallness > 0.0) r.pass = r.pass && (floor <= smallness);
        rows.push_back(r);
    };

    // boundary-layer partial sums through n-1
    auto uP = [&](std::size_t k, std::size_t j) {
        double s = hy.u0.f.at(k, j);
        for (int l = 1; l <= n - 1; ++l)
            s += std::pow(eps, 0.5 * l) * hy.layer[std::size_t(l - 1)].u.f.at(k, j);
        return s;
    };
    auto hP = [&](std::size_t k, std::size_t j) {
        double s = hy.h0.f.at(k, j);
        for (int l = 1; l <= n - 1; ++l)
            s += std::pow(eps, 0.5 * l) * hy.layer[std::size_t(l - 1)].h.f.at(k, j);
        return s;
    };
    double small = 3.0 * (dl + sg);
    add_bounded("prandtl_sup", "|(u_s^{P,n-1}, h_s^{P,n-1})|",
                station_sup([&](std::size_t k, std::size_t j) {
                    return std::hypot(uP(k, j), hP(k, j));
                }),
                small);
    add_bounded("prandtl_z2", "|z^2 (u_s^{P,n-1}, h_s^{P,n-1})|",
                station_sup([&](std::size_t k, std::size_t j) {
                    double z = hy.ys[j] / std::sqrt(hy.xs[k]);
                    return z * z * std::hypot(uP(k, j), hP(k, j));
                }));
    {
        auto s = station_sup([&](std::size_t k, std::size_t j) {
            double du = hy.u0.y.at(k, j), dh = hy.h0.y.at(k, j);
            for (int l = 1; l <= n - 1; ++l) {
                du += std::pow(eps, 0.5 * l) * hy.layer[std::size_t(l - 1)].u.y.at(k, j);
                dh += std::pow(eps, 0.5 * l) * hy.layer[std::size_t(l - 1)].h.y.at(k, j);
            }
            return std::sqrt(hy.xs[k]) * std::hypot(du, dh);
        });
        add_bounded("prandtl_dy", "|d_y(u_s,h_s)^{P,n-1} x^{1/2}|", std::move(s));
    }
    {
        auto s = station_sup([&](std::size_t k, std::size_t j) {
            double du = hy.u0.x.at(k, j), dh = hy.h0.x.at(k, j);
            for (int l = 1; l <= n - 1; ++l) {
                du += std::pow(eps, 0.5 * l) * hy.layer[std::size_t(l - 1)].u.x.at(k, j);
                dh += std::pow(eps, 0.5 * l) * hy.layer[std::size_t(l - 1)].h.x.at(k, j);
            }
            return hy.xs[k] * std::hypot(du, dh);
        });
        add_bounded("prandtl_dx", "|d_x(u_s,h_s)^{P,n-1} z^m x|", std::move(s));
    }
    {
        auto s = station_sup([&](std::size_t k, std::size_t j) {
            double dv = hy.v0.at(k, j), dg = hy.g0.at(k, j);
            for (int l = 1; l <= n - 1; ++l) {
                dv += std::pow(eps, 0.5 * l) * hy.layer[std::size_t(l - 1)].v.at(k, j);
                dg += std::pow(eps, 0.5 * l) * hy.layer[std::size_t(l - 1)].g.at(k, j);
            }
            return std::sqrt(hy.xs[k]) * std::hypot(dv, dg);
        });
        add_bounded("prandtl_v", "|(v_s,g_s)^{P,n-1} x^{1/2}|", std::move(s), small);
    }
    add_bounded("final_sup", "|(u_p^n,h_p^n) x^{1/2-sigma_n}|",
                station_sup([&](std::size_t k, std::size_t j) {
                    return std::pow(hy.xs[k], 0.5 - sigma_schedule(n, n)) *
                           std::hypot(hy.tilde->u.f.at(k, j), hy.tilde->h.f.at(k, j));
                }));
    // ideal sums
    auto uE = [&](std::size_t k, std::size_t j) {
        double s = 0.0;
        for (int l = 1; l <= n; ++l)
            s += std::pow(eps, 0.5 * l) * hy.ideal_g[std::size_t(l - 1)].ue.at(k, j);
        return s;
    };
    auto vE = [&](std::size_t k, std::size_t j) {
        double s = 0.0;
        for (int l = 1; l <= n; ++l)
            s += std::pow(eps, 0.5 * (l - 1)) * hy.ideal_g[std::size_t(l - 1)].ve.at(k, j);
        return s;
    };
    add_bounded("ideal_u", "|(u_s^E - 1, h_s^E) x^{1/2}|",
                station_sup([&](std::size_t k, std::size_t j) {
                    double u = uE(k, j);
                    return std::sqrt(hy.xs[k]) * std::hypot(u, sg * u);
                }),
                small);
    add_bounded("ideal_ux", "|(u_sx^E, h_sx^E) x^{3/2}|",
                station_sup([&](std::size_t k, std::size_t j) {
                    double ux = 0.0;
                    for (int l = 1; l <= n; ++l)
                        ux -= std::pow(eps, 0.5 * l) *
                              hy.ideal_g[std::size_t(l - 1)].veY.at(k, j);
                    return std::pow(hy.xs[k], 1.5) * std::hypot(ux, sg * ux);
                }),
                small);
    add_bounded("ideal_v", "|(v_s^E, g_s^E) x^{1/2}|",
                station_sup([&](std::size_t k, std::size_t j) {
                    double v = vE(k, j);
                    return std::sqrt(hy.xs[k]) * std::hypot(v, sg * v);
                }),
                small);
    {
        // sqrt(eps)-scaled Y-derivatives of the ideal velocity sum
        auto s = station_sup([&](std::size_t k, std::size_t j) {
            double uY = 0.0;
            for (int l = 1; l <= n; ++l)
                uY += std::pow(eps, 0.5 * l) * hy.ideal_g[std::size_t(l - 1)].vex.at(k, j);
            return std::pow(hy.xs[k], 1.5) * std::abs(uY);
        });
        SummaryRow r;
        r.claim_id = "ideal_dY";
        r.quantity = "|d_Y u_s^E x^{3/2}| <= sqrt(eps) C";
        double m = 0.0;
        for (double v : s) m = std::max(m, v);
        r.measured = m;
        r.claimed = se * 10.0;
        r.tolerance = 0.0;
        r.pass = m <= se * 10.0;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace pmhd
