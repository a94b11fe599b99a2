#pragma once

#include <vector>

#include "pmhd/fronts.hpp"
#include "pmhd/grid.hpp"
#include "pmhd/interp.hpp"
#include "pmhd/norms.hpp"

namespace pmhd {

struct SelfSimilarOptions {
    double delta = 0.05;
    double sigma = 0.05;
    double z_max = 12.0;
    std::size_t nz = 1201;
    double tol_picard = 1e-12;
    int max_iter = 200;
};

/// Converged self-similar corrections (phi, psi) on [0, z_max] together with
/// the reconstructed totals phi* = phi + e_delta, psi* = psi + e_sigma and
/// sampled derivatives for downstream evaluation at z = eta/sqrt(x).
struct SelfSimilarProfiles {
    Grid1D z;
    double delta = 0.0, sigma = 0.0;
    std::vector<double> phi, psi;
    std::vector<double> phi_star, psi_star;
    std::vector<double> dphi_star, dpsi_star;    // FD first derivatives of phi*, psi*
    std::vector<double> d2phi_star, d2psi_star;  // FD second derivatives
    NormReport hw2;
    std::vector<double> iterate_diffs;  // H_w^2 of successive Picard differences
    int iterations = 0;
    double nonlinear_residual = 0.0;    // max-norm residual of the (phi*,psi*) ODE system

    // Evaluators valid for all z >= 0: beyond z_max the corrections are zero
    // and the fronts take over analytically.
    double phi_star_at(double zv) const;
    double psi_star_at(double zv) const;
    double dphi_star_at(double zv) const;
    double dpsi_star_at(double zv) const;
    double d2phi_star_at(double zv) const;
    double d2psi_star_at(double zv) const;

    Pchip phi_i, psi_i, dphi_i, dpsi_i, d2phi_i, d2psi_i;  // correction interpolants
    void build_interpolants();
};

/// One application of the linearized operator solve:
///   -phi'' - (z/2) phi' + (z/2) e_sigma psi' = f1   (and the psi twin),
/// homogeneous Dirichlet at both ends, solved exactly as a 2x2 block
/// tridiagonal system.
void solve_linearized_pair(const Grid1D& z, double sigma,
                           const std::vector<double>& f1, const std::vector<double>& f2,
                           std::vector<double>& phi, std::vector<double>& psi);

SelfSimilarProfiles solve_selfsimilar(const SelfSimilarOptions& opt);

/// phi* = phi + e_delta, psi* = psi + e_sigma; returns the max-norm residual
/// of the full nonlinear self-similar ODE system under direct substitution
/// (finite-difference derivatives for the corrections, closed forms for the
/// fronts' part enter through the sampled totals).
double reconstruct_star(SelfSimilarProfiles& p);

}  // namespace pmhd
