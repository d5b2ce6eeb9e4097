#include "gwcal/boundaries.hpp"

#include <set>

namespace gwcal {

namespace {

std::string describe(const CellRef& c) {
    return "(" + std::to_string(c.layer) + "," + std::to_string(c.row) + "," +
           std::to_string(c.col) + ")";
}

}  // namespace

void BoundarySet::validate(const Grid& grid) const {
    std::set<int> chd_cells;
    for (const auto& b : chd) {
        if (!grid.in_bounds(b.cell) || !grid.is_active(b.cell))
            throw std::invalid_argument("chd cell " + describe(b.cell) +
                                        " out of bounds or inactive");
        chd_cells.insert(grid.cell_index(b.cell));
    }
    for (const auto& b : ghb) {
        if (!grid.in_bounds(b.cell) || !grid.is_active(b.cell))
            throw std::invalid_argument("ghb cell " + describe(b.cell) +
                                        " out of bounds or inactive");
        if (!(b.conductance > 0.0))
            throw std::invalid_argument("ghb cell " + describe(b.cell) +
                                        " has non-positive conductance");
        if (chd_cells.count(grid.cell_index(b.cell)))
            throw std::invalid_argument("cell " + describe(b.cell) +
                                        " carries both CHD and GHB conditions");
    }
    for (const auto& b : drn) {
        if (!grid.in_bounds(b.cell) || !grid.is_active(b.cell))
            throw std::invalid_argument("drain cell " + describe(b.cell) +
                                        " out of bounds or inactive");
        if (!(b.conductance > 0.0))
            throw std::invalid_argument("drain cell " + describe(b.cell) +
                                        " has non-positive conductance");
    }
    for (const auto& b : rch) {
        if (b.row < 0 || b.row >= grid.nrows() || b.col < 0 ||
            b.col >= grid.ncols())
            throw std::invalid_argument("recharge cell (" +
                                        std::to_string(b.row) + "," +
                                        std::to_string(b.col) +
                                        ") out of bounds");
        if (b.flux < 0.0)
            throw std::invalid_argument("negative recharge at (" +
                                        std::to_string(b.row) + "," +
                                        std::to_string(b.col) + ")");
    }
}

void WellSet::validate(const Grid& grid) const {
    for (const auto& w : wells) {
        if (!grid.in_bounds(w.cell) || !grid.is_active(w.cell))
            throw std::invalid_argument("well '" + w.id +
                                        "' maps to an out-of-bounds or "
                                        "inactive cell");
    }
}

}  // namespace gwcal
