#pragma once

#include <optional>
#include <vector>

#include "pmhd/diff.hpp"
#include "pmhd/grid.hpp"
#include "pmhd/ideal.hpp"
#include "pmhd/leading.hpp"

namespace pmhd {

/// sigma_i = 3^i / (3^n * 1000): the enhanced-decay schedule of the
/// intermediate layers, with sigma_n = 1/1000.
double sigma_schedule(int i, int n);

/// Quintic smoothstep cut-off in s = sqrt(eps) z: 1 on s <= 1/2, 0 on s >= 1.
double cutoff_chi(double s);
double cutoff_chi_d1(double s);
double cutoff_chi_d2(double s);
double cutoff_chi_d3(double s);

struct DerivSet {
    Field2D f, x, y, yy, xx;
    static DerivSet of(const Field2D& field) {
        return DerivSet{field, d_dx(field), d_dy(field), d2_dy2(field), d2_dx2(field)};
    }
};

/// Ideal corrector order sampled onto the layer grid at Y = sqrt(eps) y.
/// Derivatives are the kernel-exact (x,Y)-frame ones; h_e, g_e follow by the
/// sigma scalings.
struct IdealOnGrid {
    Field2D ue, ve, veY, vex, veYY, vexY;
    std::vector<double> ubar, hbar;  // wall traces on the stations
};

struct LayerForcing {
    int order = 0;
    Field2D f_u, f_h;
    Field2D p_aux, p_aux_x;  // p_p^{i,a} and its x-derivative
    Field2D r_v_prev;        // R^{v,i-1}, kept for the residual bookkeeping
};

struct ProfileOrder {
    int order = 0;
    enum class Kind { boundary_layer, final_layer, final_cutoff };
    Kind kind = Kind::boundary_layer;
    DerivSet u, h;
    Field2D v, g;
    Field2D vx, vy, vxx, vyy, gx, gy, gxx, gyy;  // derivative caches
};

struct HierarchyOptions {
    double eps = 1e-3;
    double delta = 0.05, sigma = 0.05;
    int n = 2;
    double x_max = 50.0;
    std::size_t ny = 448;
    double stretch = 6.0;
    double y_margin = 1.02;  // y_max = margin * sqrt(x_max/eps)
    std::size_t nY_ideal = 64;
    std::size_t n_u = 4096;
    double corrector_extend = 8.0;  // correctors built out to extend*x_max
    double tol_inner = 1e-10;
    int max_inner = 80;
    double tail_tol = 1e-8;
    double c0_min = 0.5;
};

/// Everything the construction accumulates: the leading order resampled to a
/// tall (x, y) grid covering the cut-off transition, the ideal correctors and
/// the boundary-layer orders with their forcings, and the cut final layer.
struct Hierarchy {
    HierarchyOptions opt;
    Grid1D xs;      // stations shared by every order
    Grid1D xs_ext;  // corrector stations (same prefix, extended tail)
    Grid1D ys;      // tall wall-normal grid
    SelfSimilarProfiles ss;
    LeadingLayer lead;

    DerivSet u0, h0;
    Field2D v0, g0;
    Field2D v0x, v0y, v0xx, v0yy, g0x, g0y;

    std::vector<IdealCorrector> ideal;  // orders 1..n on xs_ext
    std::vector<IdealOnGrid> ideal_g;   // sampled onto (xs, ys)
    std::vector<LayerForcing> forcing;  // per layer order 1..n
    std::vector<ProfileOrder> layer;    // orders 1..n (uncut)

    // cut final layer and the cut-off error terms
    std::optional<ProfileOrder> tilde;
    Field2D E_u, E_h;

    std::size_t nsta() const { return xs.size(); }
};

Hierarchy begin_hierarchy(const SelfSimilarProfiles& ss, const LeadingLayer& lead,
                          const HierarchyOptions& opt);

/// Wall data for ideal corrector i: -v_p^{i-1}(x,0) (the previous layer's
/// vertical trace; order 1 takes it from the leading layer).
std::vector<double> corrector_wall_data(const Hierarchy& hy, int i);

void add_ideal_order(Hierarchy& hy, int i);

/// f_u^{(i)}, f_h^{(i)} and the auxiliary layer pressure, assembled term by
/// term from the stored lower orders. Requires ideal order i.
LayerForcing assemble_forcing(const Hierarchy& hy, int i);

/// Implicit x-march of the coupled linear pair for (u_p^i, h_p^i) with the
/// prescribed wall traces; vertical components by the divergence-free tail
/// integrals (orders < n) or wall-anchored integrals (order n).
ProfileOrder solve_linear_layer(Hierarchy& hy, int i);

/// The full order-i step: corrector, forcing, layer march.
void add_layer_order(Hierarchy& hy, int i);

/// chi(sqrt(eps) z) cut-off of the final layer plus the induced error terms.
void apply_cutoff(Hierarchy& hy);

/// Convenience driver: orders 1..n plus the cut-off.
Hierarchy build_hierarchy(const SelfSimilarProfiles& ss, const LeadingLayer& lead,
                          const HierarchyOptions& opt);

}  // namespace pmhd
