#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gwcal {

struct CellRef {
    int layer = 0;
    int row = 0;
    int col = 0;

    bool operator==(const CellRef&) const = default;
};

/// Per-column inputs for grid construction: land surface and aquifer base
/// elevations [m asl] plus an active mask. Layering is derived, not supplied.
struct GridSpec {
    int nrows = 0;
    int ncols = 0;
    double dx = 50.0;                  // cell size, x (columns) [m]
    double dy = 50.0;                  // cell size, y (rows) [m]
    double anisotropy_ratio = 5.0;     // horizontal : vertical K
    std::vector<double> top;           // land surface per column cell [m asl]
    std::vector<double> base;          // aquifer base per column cell [m asl]
    std::vector<std::uint8_t> active;  // per column cell; empty = all active
    std::vector<int> zone_id;          // per (layer, row, col) conductivity zone
    int nlayers = 3;
};

/// Structured three-layer cell grid. Layer thicknesses follow a fixed
/// quarter / quarter / half split of the local saturated column, so the two
/// upper layers resolve water-table movement and the deep layer carries the
/// remaining volume.
class Grid {
public:
    static Grid build(const GridSpec& spec);

    int nrows() const { return nrows_; }
    int ncols() const { return ncols_; }
    int nlayers() const { return nlayers_; }
    double dx() const { return dx_; }
    double dy() const { return dy_; }
    double anisotropy_ratio() const { return anisotropy_; }
    double cell_area() const { return dx_ * dy_; }

    int ncells() const { return nlayers_ * nrows_ * ncols_; }
    int ncolumns() const { return nrows_ * ncols_; }

    int cell_index(int layer, int row, int col) const {
        return (layer * nrows_ + row) * ncols_ + col;
    }
    int cell_index(const CellRef& c) const {
        return cell_index(c.layer, c.row, c.col);
    }
    int column_index(int row, int col) const { return row * ncols_ + col; }

    bool in_bounds(const CellRef& c) const {
        return c.layer >= 0 && c.layer < nlayers_ && c.row >= 0 &&
               c.row < nrows_ && c.col >= 0 && c.col < ncols_;
    }

    /// Land surface elevation of the column containing (row, col) [m asl].
    double land_surface(int row, int col) const {
        return top_[column_index(row, col)];
    }

    double bottom(int layer, int row, int col) const {
        return bottom_[cell_index(layer, row, col)];
    }

    /// Elevation of the top of a cell: land surface for layer 0, otherwise
    /// the bottom of the layer above.
    double cell_top(int layer, int row, int col) const {
        return layer == 0 ? land_surface(row, col)
                          : bottom_[cell_index(layer - 1, row, col)];
    }

    bool is_active(int layer, int row, int col) const {
        return active_[cell_index(layer, row, col)] != 0;
    }
    bool is_active(const CellRef& c) const {
        return is_active(c.layer, c.row, c.col);
    }

    int zone(int layer, int row, int col) const {
        return zone_[cell_index(layer, row, col)];
    }

    /// Topmost active layer of a column, or -1 if the column is inactive.
    int top_active_layer(int row, int col) const {
        for (int l = 0; l < nlayers_; ++l)
            if (is_active(l, row, col)) return l;
        return -1;
    }

    const std::vector<double>& bottoms() const { return bottom_; }
    const std::vector<int>& zones() const { return zone_; }

private:
    int nrows_ = 0, ncols_ = 0, nlayers_ = 0;
    double dx_ = 0, dy_ = 0, anisotropy_ = 1;
    std::vector<double> top_;            // per column
    std::vector<double> bottom_;         // per cell
    std::vector<std::uint8_t> active_;   // per cell
    std::vector<int> zone_;              // per cell
};

/// Maps conductivity zone ids to horizontal K [m/s].
class ZoneConductivity {
public:
    ZoneConductivity() = default;
    void set(int zone, double k_ms);
    double get(int zone) const;  // throws for unknown zones
    bool has(int zone) const;

private:
    std::vector<std::pair<int, double>> values_;
};

}  // namespace gwcal
