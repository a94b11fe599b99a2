#pragma once

#include <vector>

#include "pmhd/grid.hpp"
#include "pmhd/interp.hpp"
#include "pmhd/norms.hpp"
#include "pmhd/selfsimilar.hpp"

namespace pmhd {

struct LeadingOptions {
    double delta = 0.05, sigma = 0.05;
    double x_max = 50.0;
    double z_cov = 8.0;        // eta_max = z_cov * sqrt(x_max) unless eta_max set
    double eta_max = 0.0;
    std::size_t n_eta = 384;
    double stretch = 4.0;
    double dx0 = 1e-3, dx_ratio = 1.05, dx_cap = 0.5;
    double tol_inner = 1e-10;
    int max_inner = 60;
    double sigma0 = 0.2;
    double tail_tol = 1e-8;
    double c0_min = 0.5;

    double eta_top() const;
};

/// Error pair (w, Omega) of the decomposition u_p0 + delta = phi*(z) + w,
/// h_p0 + sigma = psi*(z) + Omega, marched in the von Mises frame.
struct ErrorFields {
    Field2D w, omega;  // (x, eta)
    NormReport q_report;
};

/// Leading-order MHD boundary layer in both frames plus the transform maps.
struct LeadingLayer {
    double delta = 0.0, sigma = 0.0;
    Grid1D xs;          // stations
    Grid1D eta;         // von Mises wall-normal grid
    Field2D u_eta, h_eta;
    Field2D u, h, v, g;  // (x, y) on the common y-grid
    std::vector<std::vector<double>> y_of_eta;  // per station, on eta nodes
    std::vector<double> vbar_e1;  // = -v(x,0): corrector-1 wall data
    std::vector<double> gbar_e1;  // = sigma * vbar_e1 (the corrector identity g_e = sigma v_e)
    std::vector<double> gbar_raw;  // = -g(x,0): raw magnetic trace, kept as a diagnostic;
                                   // differs from gbar_e1 by the insulating-wall flux drift
    double c0 = 0.0, c1 = 0.0;
    double von_mises_roundtrip = 0.0;  // max |eta(y(eta)) - eta| over midpoints
};

/// Inflow data family: u00(y) = -delta exp(-y^4/4) and the magnetic twin;
/// satisfies the wall values, rapid decay and the corner compatibility
/// d_yy = 0 at y = 0.
double default_inflow_u0(double delta, double y);

/// Backward-in-x march of the quasilinear error system, inner Picard per
/// station (the linearized splitting with constant-coefficient left side).
/// Sub-steps with halved dx are inserted when the inner iteration stalls.
ErrorFields march_error_system(const SelfSimilarProfiles& ss, const LeadingOptions& opt,
                               const std::vector<double>* w0 = nullptr,
                               const std::vector<double>* om0 = nullptr);

/// u_p0 + delta = phi*(eta/sqrt(x)) + w (and magnetic twin), on the (x,eta) grid.
void compose_leading(const SelfSimilarProfiles& ss, const ErrorFields& err,
                     Field2D& u_eta, Field2D& h_eta, double delta, double sigma);

/// Full pipeline: march, compose, invert the von Mises map, resample to the
/// common y-grid and build the vertical components by tail integrals.
LeadingLayer solve_leading(const SelfSimilarProfiles& ss, const LeadingOptions& opt);

/// Residual of the magnetic first integral
///   -(1+u)(g + gbar_e1) + (v + vbar_e1)(sigma + h) - d_y h
/// on the (x,y) grid; tends to zero at the scheme's order.
Field2D first_integral_residual(const LeadingLayer& L);

}  // namespace pmhd
