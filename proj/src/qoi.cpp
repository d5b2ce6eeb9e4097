#include "gwcal/qoi.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace gwcal {

double rmse_at_wells(const Grid& grid, const std::vector<double>& heads,
                     const WellSet& wells) {
    if (wells.wells.empty())
        throw std::invalid_argument("rmse_at_wells: empty well set");
    double ss = 0.0;
    for (const auto& w : wells.wells) {
        const double r = heads[grid.cell_index(w.cell)] - w.observed_head;
        ss += r * r;
    }
    return std::sqrt(ss / static_cast<double>(wells.wells.size()));
}

double percent_above_surface(const Grid& grid,
                             const std::vector<double>& heads) {
    int surface_cells = 0;
    int above = 0;
    for (int r = 0; r < grid.nrows(); ++r) {
        for (int c = 0; c < grid.ncols(); ++c) {
            const int l = grid.top_active_layer(r, c);
            if (l < 0) continue;
            ++surface_cells;
            if (heads[grid.cell_index(l, r, c)] > grid.land_surface(r, c))
                ++above;
        }
    }
    return surface_cells > 0 ? 100.0 * above / surface_cells : 0.0;
}

QoIBundle compute_qoi(const Grid& grid, const ZoneConductivity& k,
                      const BoundarySet& bcs, const SolveResult& result,
                      const WellSet& wells, double river_length_m) {
    if (!result.converged)
        throw std::invalid_argument("compute_qoi: solve did not converge");
    if (wells.wells.empty())
        throw std::invalid_argument("compute_qoi: empty well set");

    QoIBundle q;
    q.rmse_h = rmse_at_wells(grid, result.heads, wells);
    q.h_pas = percent_above_surface(grid, result.heads);
    q.well_heads.reserve(wells.wells.size());
    for (const auto& w : wells.wells)
        q.well_heads.push_back(result.heads[grid.cell_index(w.cell)]);

    // Net groundwater flow into the river: aquifer -> river CHD cells,
    // positive for a gaining river.
    std::set<int> chd_cells;
    for (const auto& b : bcs.chd) chd_cells.insert(grid.cell_index(b.cell));
    const FaceConductances cond =
        intercell_conductance(grid, k, result.heads);
    double into_river = 0.0;
    for (const auto& b : bcs.chd) {
        if (!b.river) continue;
        const int l = b.cell.layer, r = b.cell.row, c = b.cell.col;
        const int idx = grid.cell_index(b.cell);
        auto add = [&](int l2, int r2, int c2, double face_c) {
            if (!grid.in_bounds({l2, r2, c2}) || !grid.is_active(l2, r2, c2))
                return;
            const int nb = grid.cell_index(l2, r2, c2);
            if (chd_cells.count(nb)) return;
            into_river += face_c * (result.heads[nb] - result.heads[idx]);
        };
        if (c > 0) add(l, r, c - 1, cond.xf(l, r, c - 1));
        if (c + 1 < grid.ncols()) add(l, r, c + 1, cond.xf(l, r, c));
        if (r > 0) add(l, r - 1, c, cond.yf(l, r - 1, c));
        if (r + 1 < grid.nrows()) add(l, r + 1, c, cond.yf(l, r, c));
        if (l > 0) add(l - 1, r, c, cond.zf(l - 1, r, c));
        if (l + 1 < grid.nlayers()) add(l + 1, r, c, cond.zf(l, r, c));
    }
    q.gw_flux_per_m = river_length_m > 0 ? into_river / river_length_m : 0.0;

    // Spring drain statistics in l/s over the discharging subset.
    const std::vector<double> drain_q =
        apply_drains(grid, result.heads, bcs.drn);
    int springs = 0, active = 0;
    double sum_q = 0.0, max_q = 0.0;
    for (std::size_t i = 0; i < bcs.drn.size(); ++i) {
        if (bcs.drn[i].kind != DrainKind::Spring) continue;
        ++springs;
        if (drain_q[i] > 0.0) {
            ++active;
            sum_q += drain_q[i];
            max_q = std::max(max_q, drain_q[i]);
        }
    }
    q.active_drain_pct = springs > 0 ? 100.0 * active / springs : 0.0;
    q.mean_drain_q = active > 0 ? 1000.0 * sum_q / active : 0.0;
    q.max_drain_q = 1000.0 * max_q;
    return q;
}

}  // namespace gwcal
