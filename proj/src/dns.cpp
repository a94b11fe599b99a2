#include "pmhd/dns.hpp"

#include <cmath>

#include "pmhd/diff.hpp"
#include "pmhd/errors.hpp"
#include "pmhd/interp.hpp"
#include "pmhd/parallel.hpp"
#include "pmhd/quadrature.hpp"
#include "pmhd/tridiag.hpp"
#include <cstdio>

namespace pmhd {

namespace {

struct Work {
    const Grid1D& xs;
    const Grid1D& ys;
    double eps;
    double dx;  // uniform streamwise spacing

    Work(const Grid1D& x, const Grid1D& y, double e)
        : xs(x), ys(y), eps(e), dx(x[1] - x[0]) {}

    std::size_t nx() const { return xs.size(); }
    std::size_t ny() const { return ys.size(); }
};

// second-order upwind-biased streamwise advection (U > 0 throughout)
inline double upwind_dx(const Field2D& f, std::size_t i, std::size_t j, double dx) {
    if (i >= 2)
        return (3.0 * f.at(i, j) - 4.0 * f.at(i - 1, j) + f.at(i - 2, j)) / (2.0 * dx);
    return (f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * dx);
}

inline double central_dxx(const Field2D& f, std::size_t i, std::size_t j, double dx) {
    return (f.at(i + 1, j) - 2.0 * f.at(i, j) + f.at(i - 1, j)) / (dx * dx);
}

// tridiagonal row coefficients of -d_yy on the stretched grid
struct YStencil {
    std::vector<double> lo, di, up;
    explicit YStencil(const Grid1D& ys) {
        const std::size_t n = ys.size();
        lo.assign(n, 0.0);
        di.assign(n, 0.0);
        up.assign(n, 0.0);
        for (std::size_t j = 1; j + 1 < n; ++j) {
            double hm = ys[j] - ys[j - 1], hp = ys[j + 1] - ys[j];
            double c = 2.0 / (hm * hp * (hm + hp));
            lo[j] = -c * hp;
            di[j] = c * (hm + hp);
            up[j] = -c * hm;
        }
    }
};

// first derivative in y (centered, nonuniform) as coefficients
struct YGrad {
    std::vector<double> lo, up;  // f_y ~ lo*f[j-1] + mid*f[j] + up*f[j+1]
    std::vector<double> mid;
    explicit YGrad(const Grid1D& ys) {
        const std::size_t n = ys.size();
        lo.assign(n, 0.0);
        mid.assign(n, 0.0);
        up.assign(n, 0.0);
        for (std::size_t j = 1; j + 1 < n; ++j) {
            double hm = ys[j] - ys[j - 1], hp = ys[j + 1] - ys[j];
            lo[j] = -hp / (hm * (hm + hp));
            mid[j] = (hp - hm) / (hm * hp);
            up[j] = hm / (hp * (hm + hp));
        }
    }
};

}  // namespace

DnsSolution solve_dns(const DnsOptions& opt, const ApproxSolution& approx,
                      const MmsCase* mms) {
    DnsSolution S;
    S.xs = approx.u.xs;
    S.ys = approx.u.ys;
    const Work W(S.xs, S.ys, opt.eps);
    const std::size_t nx = W.nx(), ny = W.ny();
    const double u_wall = 1.0 - opt.delta;
    const YStencil D2(S.ys);
    const YGrad D1(S.ys);

    // initial state: streamfunction / flux function of the approximate solution
    Field2D psi(S.xs, S.ys, Frame::y), A = psi, om = psi;
    for (std::size_t i = 0; i < nx; ++i) {
        std::vector<double> ucol(ny), hcol(ny);
        for (std::size_t j = 0; j < ny; ++j) {
            ucol[j] = approx.u.at(i, j);
            hcol[j] = approx.h.at(i, j);
        }
        auto pc = cumtrapz(S.ys.nodes, ucol);
        auto ac = cumtrapz(S.ys.nodes, hcol);
        for (std::size_t j = 0; j < ny; ++j) {
            psi.at(i, j) = pc[j];
            A.at(i, j) = ac[j];
        }
    }
    if (mms) {
        for (std::size_t i = 0; i < nx; ++i)
            for (std::size_t j = 0; j < ny; ++j) {
                psi.at(i, j) = mms->psi_e(S.xs[i], S.ys[j]);
                A.at(i, j) = mms->A_e(S.xs[i], S.ys[j]);
            }
    }
    {
        Field2D py = d_dy(psi), pyy = d2_dy2(psi), pxx = d2_dx2(psi);
        for (std::size_t i = 0; i < nx; ++i)
            for (std::size_t j = 0; j < ny; ++j)
                om.at(i, j) = pyy.at(i, j) + opt.eps * pxx.at(i, j);
        if (mms)
            for (std::size_t i = 0; i < nx; ++i)
                for (std::size_t j = 0; j < ny; ++j) om.at(i, j) = mms->omega_e(S.xs[i], S.ys[j]);
    }

    // Dirichlet boundary values held fixed on inflow and top
    std::vector<double> om_in(ny), A_in(ny), psi_in(ny);
    std::vector<double> om_top(nx), A_top(nx), psi_top(nx);
    for (std::size_t j = 0; j < ny; ++j) {
        om_in[j] = om.at(0, j);
        A_in[j] = A.at(0, j);
        psi_in[j] = psi.at(0, j);
    }
    for (std::size_t i = 0; i < nx; ++i) {
        om_top[i] = om.at(i, ny - 1);
        A_top[i] = A.at(i, ny - 1);
        psi_top[i] = psi.at(i, ny - 1);
    }

    Field2D U = approx.u, V = approx.v, H = approx.h, G = approx.g, J = om;
    auto update_derived = [&]() {
        par::parallel_for(std::int64_t(nx), [&](std::int64_t ii) {
            std::size_t i = std::size_t(ii);
            for (std::size_t j = 1; j + 1 < ny; ++j) {
                U.at(i, j) = D1.lo[j] * psi.at(i, j - 1) + D1.mid[j] * psi.at(i, j) +
                             D1.up[j] * psi.at(i, j + 1);
                H.at(i, j) = D1.lo[j] * A.at(i, j - 1) + D1.mid[j] * A.at(i, j) +
                             D1.up[j] * A.at(i, j + 1);
                J.at(i, j) = -(D2.lo[j] * A.at(i, j - 1) + D2.di[j] * A.at(i, j) +
                               D2.up[j] * A.at(i, j + 1));
                if (i >= 1 && i + 1 < nx) {
                    V.at(i, j) = -(psi.at(i + 1, j) - psi.at(i - 1, j)) / (2.0 * W.dx);
                    G.at(i, j) = -(A.at(i + 1, j) - A.at(i - 1, j)) / (2.0 * W.dx);
                    J.at(i, j) += opt.eps * central_dxx(A, i, j, W.dx);
                }
            }
            // wall and top rows
            U.at(i, 0) = mms ? mms->U_e(S.xs[i], 0.0) : u_wall;
            V.at(i, 0) = mms ? mms->V_e(S.xs[i], 0.0) : 0.0;
            H.at(i, 0) = mms ? mms->H_e(S.xs[i], 0.0)
                             : (A.at(i, 1) - A.at(i, 0)) / (S.ys[1] - S.ys[0]);
            G.at(i, 0) = mms ? mms->G_e(S.xs[i], 0.0) : 0.0;
            std::size_t t = ny - 1;
            double hm = S.ys[t] - S.ys[t - 1];
            U.at(i, t) = (psi.at(i, t) - psi.at(i, t - 1)) / hm;
            H.at(i, t) = (A.at(i, t) - A.at(i, t - 1)) / hm;
            if (i >= 1 && i + 1 < nx) {
                V.at(i, t) = -(psi.at(i + 1, t) - psi.at(i - 1, t)) / (2.0 * W.dx);
                G.at(i, t) = -(A.at(i + 1, t) - A.at(i - 1, t)) / (2.0 * W.dx);
            }
        });
        if (mms) {
            for (std::size_t i = 0; i < nx; ++i)
                for (std::size_t j = 0; j < ny; ++j) {
                    if (j == 0 || j == ny - 1 || i == 0 || i == nx - 1) {
                        U.at(i, j) = mms->U_e(S.xs[i], S.ys[j]);
                        V.at(i, j) = mms->V_e(S.xs[i], S.ys[j]);
                        H.at(i, j) = mms->H_e(S.xs[i], S.ys[j]);
                        G.at(i, j) = mms->G_e(S.xs[i], S.ys[j]);
                    }
                }
        }
    };
    update_derived();

    // pseudo-time step from the advective limit (diffusion in y is implicit)
    double umax = 0.0;
    for (double v : U.v) umax = std::max(umax, std::abs(v));
    const double dtau = opt.cfl / (umax / W.dx + 2.0 * opt.eps / (W.dx * W.dx));


    auto rhs_omega = [&](std::size_t i, std::size_t j) {
        double adv = U.at(i, j) * upwind_dx(om, i, j, W.dx);
        double lor = H.at(i, j) * (J.at(i + 1, j) - J.at(i - 1, j)) / (2.0 * W.dx) +
                     G.at(i, j) * (D1.lo[j] * J.at(i, j - 1) + D1.mid[j] * J.at(i, j) +
                                   D1.up[j] * J.at(i, j + 1));
        double dxx = opt.eps * central_dxx(om, i, j, W.dx);
        double s = mms ? mms->S_omega(S.xs[i], S.ys[j]) : 0.0;
        return -adv + lor + dxx + s;
    };
    auto rhs_A = [&](std::size_t i, std::size_t j) {
        double adv = U.at(i, j) * upwind_dx(A, i, j, W.dx);
        double dxx = opt.eps * central_dxx(A, i, j, W.dx);
        double s = mms ? mms->S_A(S.xs[i], S.ys[j]) : 0.0;
        return -adv + dxx + s;
    };

    Field2D om_new = om, A_new = A;
    Field2D psi_new = psi;
    std::vector<double> best(1, 1e300);
    long best_at = 0;
    double resid = 1e300;
    const double h1 = S.ys[1] - S.ys[0];

    for (long it = 0; it < opt.max_iter; ++it) {
        if (mms) {
            par::parallel_for(std::int64_t(nx), [&](std::int64_t ii) {
                std::size_t i = std::size_t(ii);
                om.at(i, 0) = mms->omega_e(S.xs[i], 0.0);
            });
        }

        // A line-implicit update, Jacobi in x
        par::parallel_for(std::int64_t(nx - 2), [&](std::int64_t ii) {
            std::size_t i = std::size_t(ii) + 1;
            std::vector<double> lo(ny), di(ny), up(ny), ra(ny);
            for (std::size_t j = 0; j < ny; ++j) {
                if (j == 0 || j == ny - 1) {
                    lo[j] = up[j] = 0.0;
                    di[j] = 1.0;
                    ra[j] = (j == 0) ? (mms ? mms->A_e(S.xs[i], 0.0) : 0.0) : A_top[i];
                    continue;
                }
                double vj = V.at(i, j);
                lo[j] = D2.lo[j] + vj * D1.lo[j];
                di[j] = 1.0 / dtau + D2.di[j] + vj * D1.mid[j];
                up[j] = D2.up[j] + vj * D1.up[j];
                ra[j] = A.at(i, j) / dtau + rhs_A(i, j);
            }
            auto an = solve_tridiagonal(lo, di, up, ra);
            for (std::size_t j = 1; j + 1 < ny; ++j)
                A_new.at(i, j) = A.at(i, j) + opt.relax * (an[j] - A.at(i, j));
        });

        // coupled (omega, psi) column update: the Thom wall relation sits as
        // an implicit row of the block system, so the wall-vorticity loop is
        // solved rather than iterated across pseudo-steps
        par::parallel_for(std::int64_t(nx - 2), [&](std::int64_t ii) {
            std::size_t i = std::size_t(ii) + 1;
            std::vector<Block2> lo(ny), di(ny), up(ny);
            std::vector<Vec2> rhs(ny);
            for (std::size_t j = 0; j < ny; ++j) {
                if (j == 0) {
                    if (mms) {
                        lo[j] = up[j] = Block2{0, 0, 0, 0};
                        di[j] = Block2{1, 0, 0, 1};
                        rhs[j] = {mms->omega_e(S.xs[i], 0.0), mms->psi_e(S.xs[i], 0.0)};
                    } else {
                        // omega_0 - (2/h1^2) psi_1 + (2/h1^2) psi_0 = -2 u_wall/h1
                        lo[j] = Block2{0, 0, 0, 0};
                        di[j] = Block2{1.0, 2.0 / (h1 * h1), 0.0, 1.0};
                        up[j] = Block2{0.0, -2.0 / (h1 * h1), 0.0, 0.0};
                        rhs[j] = {-2.0 * u_wall / h1, 0.0};
                    }
                    continue;
                }
                if (j == ny - 1) {
                    lo[j] = up[j] = Block2{0, 0, 0, 0};
                    di[j] = Block2{1, 0, 0, 1};
                    rhs[j] = {om_top[i], psi_top[i]};
                    continue;
                }
                double vj = V.at(i, j);
                lo[j] = Block2{D2.lo[j] + vj * D1.lo[j], 0.0, 0.0, -D2.lo[j]};
                di[j] = Block2{1.0 / dtau + D2.di[j] + vj * D1.mid[j], 0.0, -1.0,
                               -D2.di[j] - 2.0 * opt.eps / (W.dx * W.dx)};
                up[j] = Block2{D2.up[j] + vj * D1.up[j], 0.0, 0.0, -D2.up[j]};
                rhs[j] = {om.at(i, j) / dtau + rhs_omega(i, j),
                          -opt.eps * (psi.at(i + 1, j) + psi.at(i - 1, j)) / (W.dx * W.dx)};
            }
            auto sol = solve_block_tridiagonal(lo, di, up, rhs);
            for (std::size_t j = 0; j < ny; ++j) {
                if (j + 1 < ny || true) {
                    om_new.at(i, j) = om.at(i, j) + opt.relax * (sol[j][0] - om.at(i, j));
                    psi_new.at(i, j) = psi.at(i, j) + opt.relax * (sol[j][1] - psi.at(i, j));
                }
            }
        });
        for (std::size_t i = 1; i + 1 < nx; ++i)
            for (std::size_t j = 0; j < ny; ++j) {
                om.at(i, j) = om_new.at(i, j);
                psi.at(i, j) = psi_new.at(i, j);
                if (j > 0 && j + 1 < ny) A.at(i, j) = A_new.at(i, j);
            }
        // outflow: zero streamwise gradient
        if (!mms)
            for (std::size_t j = 0; j < ny; ++j) {
                om.at(nx - 1, j) = om.at(nx - 2, j);
                A.at(nx - 1, j) = A.at(nx - 2, j);
                psi.at(nx - 1, j) = psi.at(nx - 2, j);
            }

        // extra streamfunction polish sweeps (Poisson only, omega frozen)
        double ptol = std::max(1e-12, 1e-3 * std::min(resid, 1.0));
        for (int sweep = 0; sweep < 30; ++sweep) {
            par::parallel_for(std::int64_t(nx - 2), [&](std::int64_t ii) {
                std::size_t i = std::size_t(ii) + 1;
                std::vector<double> lo(ny), di(ny), up(ny), r(ny);
                for (std::size_t j = 0; j < ny; ++j) {
                    if (j == 0 || j == ny - 1) {
                        lo[j] = up[j] = 0.0;
                        di[j] = 1.0;
                        r[j] = (j == 0) ? (mms ? mms->psi_e(S.xs[i], 0.0) : 0.0) : psi_top[i];
                        continue;
                    }
                    lo[j] = -D2.lo[j];
                    di[j] = -D2.di[j] - 2.0 * opt.eps / (W.dx * W.dx);
                    up[j] = -D2.up[j];
                    r[j] = om.at(i, j) -
                           opt.eps * (psi.at(i + 1, j) + psi.at(i - 1, j)) / (W.dx * W.dx);
                }
                auto pn = solve_tridiagonal(lo, di, up, r);
                for (std::size_t j = 1; j + 1 < ny; ++j) psi_new.at(i, j) = pn[j];
            });
            double pres = 0.0;
            for (std::size_t i = 1; i + 1 < nx; ++i)
                for (std::size_t j = 1; j + 1 < ny; ++j) {
                    pres = std::max(pres, std::abs(psi_new.at(i, j) - psi.at(i, j)));
                    psi.at(i, j) = psi_new.at(i, j);
                }
            if (!mms)
                for (std::size_t j = 0; j < ny; ++j) psi.at(nx - 1, j) = psi.at(nx - 2, j);
            if (pres < ptol) break;
        }
        if (!mms) om.at(nx - 1, 0) = om.at(nx - 2, 0);

        update_derived();

        if (std::getenv("PMHD_DNS_DEBUG") && it < 80 && it % 4 == 0) {
            double womax=0, wimax=0, jmax=0, umax2=0;
            std::size_t wi=0,wj=0;
            for (std::size_t i = 0; i < nx; ++i) womax = std::max(womax, std::abs(om.at(i,0)));
            for (std::size_t i = 0; i < nx; ++i)
                for (std::size_t j = 0; j < ny; ++j) {
                    if (std::abs(om.at(i,j))>wimax){wimax=std::abs(om.at(i,j));wi=i;wj=j;}
                    jmax=std::max(jmax,std::abs(J.at(i,j)));
                    umax2=std::max(umax2,std::abs(U.at(i,j)));
                }
            std::size_t ui=0, uj=0; double um=0;
            for (std::size_t i = 0; i < nx; ++i)
                for (std::size_t j = 0; j < ny; ++j)
                    if (std::abs(U.at(i,j))>um){um=std::abs(U.at(i,j));ui=i;uj=j;}
            // damping-style residual scan
            double rm=0; std::size_t ri=0, rj=0;
            for (std::size_t i = 1; i + 1 < nx; ++i)
                for (std::size_t j = 1; j + 1 < ny; ++j) {
                    double dyy = -(D2.lo[j]*om.at(i,j-1)+D2.di[j]*om.at(i,j)+D2.up[j]*om.at(i,j+1));
                    double vdy = V.at(i,j)*(D1.lo[j]*om.at(i,j-1)+D1.mid[j]*om.at(i,j)+D1.up[j]*om.at(i,j+1));
                    double r1 = std::abs(rhs_omega(i,j)+dyy-vdy);
                    if (std::isfinite(r1) && r1>rm){rm=r1;ri=i;rj=j;}
                }
            std::printf("it=%ld om_wall=%.4g U=%.8g at(%zu,%zu x=%.3g y=%.3g) res=%.4g at(%zu,%zu x=%.3g y=%.3g)\n",
                        it, womax, um, ui, uj, S.xs[ui], S.ys[uj], rm, ri, rj, S.xs[ri], S.ys[rj]);
            (void)wimax; (void)wi; (void)wj; (void)jmax; (void)umax2;
        }
        if (it % opt.check_every == 0) {
            // steady residual with the update stencils
            std::vector<double> part(nx, 0.0);
            par::parallel_for(std::int64_t(nx - 2), [&](std::int64_t ii) {
                std::size_t i = std::size_t(ii) + 1;
                double m = 0.0;
                for (std::size_t j = 1; j + 1 < ny; ++j) {
                    double dyy = -(D2.lo[j] * om.at(i, j - 1) + D2.di[j] * om.at(i, j) +
                                   D2.up[j] * om.at(i, j + 1));
                    double vdy = V.at(i, j) * (D1.lo[j] * om.at(i, j - 1) +
                                               D1.mid[j] * om.at(i, j) +
                                               D1.up[j] * om.at(i, j + 1));
                    double r1 = rhs_omega(i, j) + dyy - vdy;
                    double dyyA = -(D2.lo[j] * A.at(i, j - 1) + D2.di[j] * A.at(i, j) +
                                    D2.up[j] * A.at(i, j + 1));
                    double vdyA = V.at(i, j) * (D1.lo[j] * A.at(i, j - 1) +
                                                D1.mid[j] * A.at(i, j) +
                                                D1.up[j] * A.at(i, j + 1));
                    double r2 = rhs_A(i, j) + dyyA - vdyA;
                    double rr = std::max(std::abs(r1), std::abs(r2));
                    if (!std::isfinite(rr)) rr = 1e300;
                    m = std::max(m, rr);
                }
                part[i] = m;
            });
            resid = 0.0;
            for (double v : part) resid = std::max(resid, v);
            S.residual_history.push_back(resid);
            S.iterations = it + 1;
            if (resid > 1e8)
                throw NonConvergenceError("solve_dns: diverged", S.residual_history);
            if (resid < opt.dns_tol) break;
            if (resid < best.back() * 0.99) {
                best.push_back(resid);
                best_at = it;
            } else if (it - best_at > opt.stall_window) {
                throw NonConvergenceError("solve_dns: residual plateau", S.residual_history);
            }
        }
    }
    if (S.residual_history.empty() || S.residual_history.back() > opt.dns_tol)
        throw NonConvergenceError("solve_dns: no convergence in max_iter", S.residual_history);

    S.U = U;
    S.V = V;
    S.H = H;
    S.G = G;
    S.psi = psi;
    S.A = A;
    S.omega = om;
    S.final_residual = S.residual_history.back();
    return S;
}

RemainderFields remainder_fields(const DnsSolution& dns, const ApproxSolution& approx,
                                 double eps, int n, double gamma) {
    const double scale = std::pow(eps, -0.5 * double(n) - gamma);
    RemainderFields R;
    R.u = dns.U;
    R.v = dns.V;
    R.h = dns.H;
    R.g = dns.G;
    for (std::size_t q = 0; q < R.u.v.size(); ++q) {
        R.u.v[q] = scale * (dns.U.v[q] - approx.u.v[q]);
        R.v.v[q] = scale * (dns.V.v[q] - approx.v.v[q]);
        R.h.v[q] = scale * (dns.H.v[q] - approx.h.v[q]);
        R.g.v[q] = scale * (dns.G.v[q] - approx.g.v[q]);
    }
    return R;
}

ConvergenceRow evaluate_convergence(const DnsSolution& dns, const Hierarchy& hy, double x_frac) {
    const double eps = hy.opt.eps, sg = hy.opt.sigma, se = std::sqrt(eps);
    ConvergenceRow row;
    row.eps = eps;
    row.iterations = dns.iterations;
    row.residual = dns.final_residual;
    const double x_hi = dns.xs.back() * x_frac;

    CorrectorEval ve1(hy.ideal[0].xs, hy.ideal[0].Ys, hy.ideal[0].v);
    Field2D u0r = resample_field(hy.u0.f, dns.xs, dns.ys, true);
    Field2D h0r = resample_field(hy.h0.f, dns.xs, dns.ys, true);
    Field2D v0r = resample_field(hy.v0, dns.xs, dns.ys, false);
    Field2D g0r = resample_field(hy.g0, dns.xs, dns.ys, false);

    double E1 = 0.0, E2 = 0.0;
    for (std::size_t i = 0; i < dns.xs.size(); ++i) {
        double x = dns.xs[i];
        if (x > x_hi) break;
        double w1 = std::pow(x, 0.25), w2 = std::sqrt(x);
        for (std::size_t j = 0; j < dns.ys.size(); ++j) {
            double y = dns.ys[j];
            double ve = ve1(x, se * y);
            double ge = sg * ve;
            E1 = std::max(E1, w1 * std::abs(dns.U.at(i, j) - 1.0 - u0r.at(i, j)));
            E1 = std::max(E1, w1 * std::abs(dns.H.at(i, j) - sg - h0r.at(i, j)));
            E2 = std::max(E2, w2 * se * std::abs(dns.V.at(i, j) - v0r.at(i, j) - ve));
            E2 = std::max(E2, w2 * se * std::abs(dns.G.at(i, j) - g0r.at(i, j) - ge));
        }
    }
    row.E1 = E1;
    row.E2 = E2;
    return row;
}

}  // namespace pmhd
