#pragma once

#include <vector>

#include "gwcal/boundaries.hpp"
#include "gwcal/grid.hpp"
#include "gwcal/solver.hpp"

namespace gwcal {

/// Derived metrics of one converged solve.
struct QoIBundle {
    double rmse_h = 0.0;           // head misfit at wells [m]
    double h_pas = 0.0;            // % of active surface cells with head above land
    double gw_flux_per_m = 0.0;    // net flow into river CHD cells / river length [m^3/s/m]
    double active_drain_pct = 0.0; // % of spring drains discharging
    double mean_drain_q = 0.0;     // mean discharge of active spring drains [l/s]
    double max_drain_q = 0.0;      // max discharge of active spring drains [l/s]
    std::vector<double> well_heads;  // modeled head per well [m asl]
};

/// Root-mean-square error between modeled heads and well observations [m].
double rmse_at_wells(const Grid& grid, const std::vector<double>& heads,
                     const WellSet& wells);

/// Percent of active surface cells (topmost active cell per column) whose
/// head exceeds the land surface.
double percent_above_surface(const Grid& grid, const std::vector<double>& heads);

/// All quantities of interest for a converged solve. Throws if the result is
/// not converged or the well set is empty.
QoIBundle compute_qoi(const Grid& grid, const ZoneConductivity& k,
                      const BoundarySet& bcs, const SolveResult& result,
                      const WellSet& wells, double river_length_m);

}  // namespace gwcal
