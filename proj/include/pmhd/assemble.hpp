#pragma once

#include <string>
#include <vector>

#include "pmhd/layers.hpp"
#include "pmhd/norms.hpp"

namespace pmhd {

/// Assembled approximate solution on a target (x, y) grid, with the exact
/// eps-prefactors of the expansion including both auxiliary pressure families.
struct ApproxSolution {
    Field2D u, v, h, g, p;
};

/// PCHIP-in-y resample with linear blending between bracketing stations.
Field2D resample_field(const Field2D& src, const Grid1D& xs, const Grid1D& ys,
                       bool zero_beyond = true);

/// Evaluate the approximate solution on the hierarchy's own grid (the cut
/// final layer stands in for order n).
ApproxSolution build_approximate(const Hierarchy& hy);

/// Evaluate on an arbitrary (x, y) grid inside the hierarchy's coverage
/// (used for DNS boundary data and remainder extraction).
ApproxSolution build_approximate_on(const Hierarchy& hy, const Grid1D& xs, const Grid1D& ys);

enum class ResidualRoute { formula, operator_route };

struct ResidualSet {
    Field2D R_u, R_v, R_h, R_g;
    ResidualRoute route;
};

/// route = formula: the order-n remainder expressions assembled term by term.
/// route = operator: the scaled viscous MHD operator applied to the
/// assembled approximate solution.
ResidualSet compute_residuals(const Hierarchy& hy, ResidualRoute route);

/// Pointwise bound on how far the stored discrete profiles fail their own
/// construction equations (finite differences on this grid): the honest
/// yardstick for the route-agreement cross-check.
Field2D residual_discretization_estimate(const Hierarchy& hy);

struct SummaryRow {
    std::string claim_id;
    std::string quantity;
    double measured = 0.0;     // fitted exponent or weighted sup, per kind
    double claimed = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// One row per summary estimate: measured weighted sups with their fitted
/// x-exponents against the claimed boundedness, at +-0.2 exponent tolerance.
std::vector<SummaryRow> verify_summary(const Hierarchy& hy);

}  // namespace pmhd
