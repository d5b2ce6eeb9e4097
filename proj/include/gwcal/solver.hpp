#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "gwcal/boundaries.hpp"
#include "gwcal/grid.hpp"

namespace gwcal {

enum class OuterMethod { Picard, Newton };

struct SolverOptions {
    OuterMethod method = OuterMethod::Newton;
    int max_outer = 200;
    double head_tol = 1e-6;     // outer convergence: max |dh| [m]
    double linear_tol = 1e-10;  // inner solve relative residual
    double dry_floor = 1e-3;    // minimum saturated thickness [m]
    std::optional<double> initial_head;  // default: land surface per column
    // full warm-start field (per cell); wins over initial_head when its size
    // matches the grid. CHD cells are reset to their fixed values.
    std::optional<std::vector<double>> initial_heads;
};

/// Volumetric budget by boundary type [m^3/s]. "in" is flow into the aquifer.
struct Budget {
    double chd_in = 0, chd_out = 0;
    double ghb_in = 0, ghb_out = 0;
    double drn_out = 0;
    double rch_in = 0;

    double total_in() const { return chd_in + ghb_in + rch_in; }
    double total_out() const { return chd_out + ghb_out + drn_out; }
    double relative_error() const {
        const double in = total_in(), out = total_out();
        const double scale = std::max(in, out);
        return scale > 0 ? std::abs(in - out) / scale : 0.0;
    }
};

struct SolveResult {
    std::vector<double> heads;  // per cell [m asl]; NaN where inactive
    bool converged = false;
    int iterations = 0;
    double final_residual = std::numeric_limits<double>::infinity();  // max |dh| [m]
    double max_cell_flux_residual = 0.0;  // inf-norm of per-cell flux sums [m^3/s]
    Budget budget;
};

/// Conductances of internal faces between active cells, evaluated at a head
/// field. x faces join (l,r,c)-(l,r,c+1), y faces join (l,r,c)-(l,r+1,c),
/// z faces join layer l to l+1. Faces touching an inactive cell are zero.
struct FaceConductances {
    int nrows = 0, ncols = 0, nlayers = 0;
    std::vector<double> x, y, z;  // [m^2/s]

    double& xf(int l, int r, int c) { return x[(l * nrows + r) * (ncols - 1) + c]; }
    double& yf(int l, int r, int c) { return y[(l * (nrows - 1) + r) * ncols + c]; }
    double& zf(int l, int r, int c) { return z[(l * nrows + r) * ncols + c]; }
    double xf(int l, int r, int c) const { return x[(l * nrows + r) * (ncols - 1) + c]; }
    double yf(int l, int r, int c) const { return y[(l * (nrows - 1) + r) * ncols + c]; }
    double zf(int l, int r, int c) const { return z[(l * nrows + r) * ncols + c]; }
};

/// Saturated thickness of a cell at head h: min(h, cell top) - cell bottom,
/// clamped below at the dry-cell floor so the system stays nonsingular.
double saturated_thickness(const Grid& grid, int layer, int row, int col,
                           double head, double dry_floor);

/// Control-volume face conductances: harmonic combination of the two
/// half-cell conductances K * saturated thickness * face width / half
/// distance. Vertical faces use K / anisotropy_ratio over half the saturated
/// thickness.
FaceConductances intercell_conductance(const Grid& grid,
                                       const ZoneConductivity& k,
                                       const std::vector<double>& heads,
                                       double dry_floor = 1e-3);

/// Steady-state solve of the saturated flow equation on an unconfined zoned
/// grid. Outer iteration is Picard (lagged conductances) or damped Newton
/// with line search and Picard fallback; inner linear systems go through a
/// conjugate-gradient solve (Picard) or sparse LU (Newton).
///
/// Non-convergence is reported through SolveResult::converged, not an
/// exception, so screening layers can discard the run. A system with no CHD
/// or GHB cell is rejected (singular).
SolveResult solve_steady(const Grid& grid, const ZoneConductivity& k,
                         const BoundarySet& bcs, const SolverOptions& opts);

/// Per-drain discharge at the supplied heads: Q = C * max(0, h - z) [m^3/s].
std::vector<double> apply_drains(const Grid& grid,
                                 const std::vector<double>& heads,
                                 const std::vector<DrainCell>& drains);

}  // namespace gwcal
