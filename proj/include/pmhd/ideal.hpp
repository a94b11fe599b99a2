#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "pmhd/grid.hpp"
#include "pmhd/interp.hpp"

namespace pmhd {

/// Wall data b(s) for the half-plane extension: sampled on s in [1, s_max],
/// evenly reflected about s = 1, and continued by a fitted power law
/// b ~ A s^rho beyond the samples (the construction presumes data on the
/// whole boundary; the extension choice is recorded in run metadata).
struct BoundaryData {
    Pchip interp;
    double s_min = 1.0, s_max = 1.0;
    double tail_amp = 0.0, tail_rho = -0.5;
    bool constant = false;  // b identically tail_amp (kernel-mass checks)

    double operator()(double s) const;
    double limit_at_inf() const { return constant ? tail_amp : 0.0; }

    static BoundaryData from_samples(const Grid1D& xs, std::span<const double> b,
                                     double rho_fallback);
    static BoundaryData constant_data(double c);
};

struct IdealOptions {
    double Y_max = 10.0;
    std::size_t nY = 64;
    double stretchY = 3.0;
    std::size_t n_u = 4096;       // tangent-variable quadrature nodes
    double tail_rho_fallback = -0.5;
    bool serial = false;          // force the serial reference kernel
};

/// Moments of the Poisson kernel and its derivatives against the wall data,
/// all from one pass of the s = x + Y tan(u) substitution.
struct PoissonMoments {
    double v = 0, vY = 0, vx = 0, vYY = 0, vxY = 0;
};

PoissonMoments poisson_moments(const std::function<double(double)>& b, double b_inf,
                               double x, double Y, std::size_t n_u,
                               double s_break = std::numeric_limits<double>::quiet_NaN());

/// One ideal MHD corrector order: harmonic extension v_e of the previous
/// layer's vertical wall trace, its conjugate partner u_e, the sigma-scaled
/// magnetic pair and pressures.
struct IdealCorrector {
    int order = 1;
    double sigma = 0.0;
    Grid1D xs, Ys;
    Field2D v, vY, vx, vYY, vxY;  // kernel-exact fields in (x, Y)
    Field2D u;                    // u_e = int_x^inf d_Y v_e
    std::vector<double> ubar, hbar;  // wall traces u_e(x,0), sigma*u_e(x,0)
    std::vector<double> wall_b;      // b(x) = -v_p^{i-1}(x,0) = v_e(x,0)
    BoundaryData bdata;
    double kernel_mass_err = 0.0;

    // h_e = sigma u_e, g_e = sigma v_e, p_e = -(1-sigma^2) u_e by construction.
    double h_at(std::size_t i, std::size_t j) const { return sigma * u.at(i, j); }
    double g_at(std::size_t i, std::size_t j) const { return sigma * v.at(i, j); }
};

/// Poisson extension of sampled wall data onto the (xs, Y) grid.
/// Enforces the kernel-mass identity (quadrature of the bare kernel equals 1)
/// to 1e-6 before returning.
IdealCorrector poisson_extend(int order, const Grid1D& xs, std::span<const double> b_samples,
                              double sigma, const IdealOptions& opt);

/// Same extension machinery for an analytic full-line boundary function
/// (closed-form validation path; no reflection, no tail fit).
Field2D poisson_extend_analytic(const std::function<double(double)>& b, double b_inf,
                                const Grid1D& xs, const Grid1D& Ys, std::size_t n_u,
                                bool serial = false);

/// Conjugate partner and traces: fills u, ubar, hbar of the corrector.
/// u_e by streamwise tail integration of v_eY with a power-law tail patch;
/// the wall trace by the principal-value (Hilbert-transform) quadrature.
void build_cr_partner(IdealCorrector& c);

/// Auxiliary ideal MHD pressure p_e^{i,a} for order i (1-based index into
/// the orders vector), combining the lower orders with eps^{(j-i)/2} weights.
Field2D ideal_aux_pressure(const std::vector<IdealCorrector>& orders, int i, double eps);

/// Interpolating view of a corrector field: PCHIP in Y per station, linear
/// blend between bracketing stations for off-station x.
class CorrectorEval {
  public:
    CorrectorEval() = default;
    CorrectorEval(const Grid1D& xs, const Grid1D& Ys, const Field2D& f);
    double at_station(std::size_t i, double Y) const { return rows_[i].eval(Y); }
    double operator()(double x, double Y) const;

  private:
    std::vector<Pchip> rows_;
    const Grid1D* xs_ = nullptr;
};

}  // namespace pmhd
