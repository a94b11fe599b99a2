#pragma once

#include <functional>
#include <vector>

#include "pmhd/assemble.hpp"
#include "pmhd/grid.hpp"

namespace pmhd {

struct DnsOptions {
    double eps = 1e-3;
    double delta = 0.05, sigma = 0.05;
    double x_max = 50.0, y_max = 12.0;
    std::size_t nx = 512, ny = 192;
    double stretch = 3.0;
    double dns_tol = 1e-8;
    double relax = 0.7;
    double cfl = 0.7;
    long max_iter = 400000;
    long stall_window = 5000;
    long check_every = 25;
};

/// Optional manufactured-solution sources and exact fields (order studies).
struct MmsCase {
    std::function<double(double, double)> S_omega, S_A;
    std::function<double(double, double)> omega_e, A_e, psi_e;
    std::function<double(double, double)> U_e, V_e, H_e, G_e;
};

struct DnsSolution {
    Grid1D xs, ys;
    Field2D U, V, H, G;
    Field2D psi, A, omega;
    std::vector<double> residual_history;  // sampled every check_every iterations
    long iterations = 0;
    double final_residual = 0.0;
};

/// Steady solver in the scaled frame: pseudo-time on (omega, A) with the
/// anisotropic streamfunction Poisson solve each step, under-relaxed
/// line-implicit updates, outflow by zero streamwise gradient. Inflow, top
/// and the initial state come from the assembled approximate solution.
DnsSolution solve_dns(const DnsOptions& opt, const ApproxSolution& approx,
                      const MmsCase* mms = nullptr);

/// Scaled remainders eps^{-n/2-gamma} (exact - approx), componentwise.
struct RemainderFields {
    Field2D u, v, h, g;
};
RemainderFields remainder_fields(const DnsSolution& dns, const ApproxSolution& approx,
                                 double eps, int n, double gamma);

struct ConvergenceRow {
    double eps = 0.0;
    double E1 = 0.0, E2 = 0.0;
    double Z_diag = 0.0;
    long iterations = 0;
    double residual = 0.0;
};

/// Corollary-style sup errors against the leading-order layer plus first
/// ideal corrector, measured away from the outflow strip.
ConvergenceRow evaluate_convergence(const DnsSolution& dns, const Hierarchy& hy,
                                    double x_frac = 0.9);

}  // namespace pmhd
