#include "gwcal/grid.hpp"

namespace gwcal {

Grid Grid::build(const GridSpec& spec) {
    if (spec.nrows <= 0 || spec.ncols <= 0)
        throw std::invalid_argument("grid: nrows and ncols must be positive");
    if (spec.dx <= 0.0 || spec.dy <= 0.0)
        throw std::invalid_argument("grid: dx and dy must be positive");
    if (spec.nlayers != 3)
        throw std::invalid_argument("grid: layering rule is defined for 3 layers");
    const std::size_t ncol_cells =
        static_cast<std::size_t>(spec.nrows) * spec.ncols;
    if (spec.top.size() != ncol_cells || spec.base.size() != ncol_cells)
        throw std::invalid_argument("grid: top/base must have nrows*ncols entries");
    if (!spec.active.empty() && spec.active.size() != ncol_cells)
        throw std::invalid_argument("grid: active mask size mismatch");

    Grid g;
    g.nrows_ = spec.nrows;
    g.ncols_ = spec.ncols;
    g.nlayers_ = spec.nlayers;
    g.dx_ = spec.dx;
    g.dy_ = spec.dy;
    g.anisotropy_ = spec.anisotropy_ratio;
    g.top_ = spec.top;

    const std::size_t ncells = ncol_cells * spec.nlayers;
    g.bottom_.assign(ncells, 0.0);
    g.active_.assign(ncells, 1);
    g.zone_.assign(ncells, 0);

    for (int r = 0; r < spec.nrows; ++r) {
        for (int c = 0; c < spec.ncols; ++c) {
            const int col_idx = r * spec.ncols + c;
            const bool col_active = spec.active.empty() || spec.active[col_idx];
            const double top = spec.top[col_idx];
            const double base = spec.base[col_idx];
            if (col_active) {
                if (base > top)
                    throw std::invalid_argument(
                        "grid: base above top at row " + std::to_string(r) +
                        " col " + std::to_string(c));
                if (base == top)
                    throw std::invalid_argument(
                        "grid: zero thickness at row " + std::to_string(r) +
                        " col " + std::to_string(c));
            }
            const double thickness = top - base;
            // quarter / quarter / half vertical split
            const double b0 = top - 0.25 * thickness;
            const double b1 = top - 0.50 * thickness;
            const double b2 = base;
            for (int l = 0; l < 3; ++l) {
                const int idx = (l * spec.nrows + r) * spec.ncols + c;
                g.bottom_[idx] = (l == 0) ? b0 : (l == 1) ? b1 : b2;
                g.active_[idx] = col_active ? 1 : 0;
            }
        }
    }

    if (!spec.zone_id.empty()) {
        if (spec.zone_id.size() != ncells)
            throw std::invalid_argument("grid: zone_id size mismatch");
        g.zone_ = spec.zone_id;
    }
    return g;
}

void ZoneConductivity::set(int zone, double k_ms) {
    if (!(k_ms > 0.0))
        throw std::invalid_argument("zone conductivity must be positive");
    for (auto& [z, k] : values_) {
        if (z == zone) {
            k = k_ms;
            return;
        }
    }
    values_.emplace_back(zone, k_ms);
}

double ZoneConductivity::get(int zone) const {
    for (const auto& [z, k] : values_)
        if (z == zone) return k;
    throw std::out_of_range("no conductivity defined for zone " +
                            std::to_string(zone));
}

bool ZoneConductivity::has(int zone) const {
    for (const auto& [z, k] : values_)
        if (z == zone) return true;
    return false;
}

}  // namespace gwcal
