#pragma once

#include <string>
#include <vector>

#include "gwcal/grid.hpp"

namespace gwcal {

/// Fixed-head cell (rivers, known stage). `river` cells contribute to the
/// groundwater-flux quantity of interest.
struct ChdCell {
    CellRef cell;
    double head = 0.0;  // [m asl]
    bool river = false;
};

/// Head-dependent boundary: flux = conductance * (boundary head - cell head).
struct GhbCell {
    CellRef cell;
    double head = 0.0;         // [m asl]
    double conductance = 0.0;  // [m^2/s]
};

enum class DrainKind { Spring, Rice };

/// One-way outflow: Q = conductance * max(0, head - elevation).
struct DrainCell {
    CellRef cell;
    double elevation = 0.0;    // [m asl]
    double conductance = 0.0;  // [m^2/s]
    DrainKind kind = DrainKind::Spring;
};

/// Specified recharge flux [m/s] applied to the topmost active cell of a
/// column (the column is addressed by row/col; layer is resolved at solve
/// time).
struct RechargeCell {
    int row = 0;
    int col = 0;
    double flux = 0.0;  // [m/s], >= 0
};

struct BoundarySet {
    std::vector<ChdCell> chd;
    std::vector<GhbCell> ghb;
    std::vector<DrainCell> drn;
    std::vector<RechargeCell> rch;

    /// Checks invariants against a grid: cells in bounds and active, no cell
    /// carrying both CHD and GHB, positive conductances, non-negative
    /// recharge. Throws std::invalid_argument describing the first violation.
    void validate(const Grid& grid) const;
};

struct Well {
    std::string id;
    CellRef cell;
    double observed_head = 0.0;  // [m asl]
};

struct WellSet {
    std::vector<Well> wells;

    void validate(const Grid& grid) const;
    std::size_t size() const { return wells.size(); }
};

}  // namespace gwcal
