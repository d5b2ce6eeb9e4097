#include "doctest.h"
#include "gwcal/grid.hpp"

using namespace gwcal;

namespace {

GridSpec flat_spec(int nrows, int ncols, double top, double base) {
    GridSpec s;
    s.nrows = nrows;
    s.ncols = ncols;
    s.top.assign(nrows * ncols, top);
    s.base.assign(nrows * ncols, base);
    return s;
}

}  // namespace

TEST_CASE("layer bottoms follow the quarter/quarter/half split") {
    const Grid g = Grid::build(flat_spec(2, 3, 100.0, 60.0));
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 3; ++c) {
            CHECK(g.bottom(0, r, c) == doctest::Approx(90.0));
            CHECK(g.bottom(1, r, c) == doctest::Approx(80.0));
            CHECK(g.bottom(2, r, c) == doctest::Approx(60.0));
            CHECK(g.cell_top(0, r, c) == doctest::Approx(100.0));
            CHECK(g.cell_top(1, r, c) == doctest::Approx(90.0));
            CHECK(g.cell_top(2, r, c) == doctest::Approx(80.0));
        }
    }
}

TEST_CASE("zero thickness column is rejected") {
    CHECK_THROWS_WITH_AS(Grid::build(flat_spec(1, 1, 50.0, 50.0)),
                         doctest::Contains("zero thickness"),
                         std::invalid_argument);
}

TEST_CASE("base above top is rejected with the cell location") {
    GridSpec s = flat_spec(4, 4, 100.0, 60.0);
    s.base[s.ncols * 2 + 3] = 120.0;  // row 2, col 3
    CHECK_THROWS_WITH_AS(Grid::build(s), doctest::Contains("row 2 col 3"),
                         std::invalid_argument);
}

TEST_CASE("sloping base bottoms verified by direct arithmetic") {
    GridSpec s = flat_spec(10, 10, 0.0, 0.0);
    for (int r = 0; r < 10; ++r) {
        for (int c = 0; c < 10; ++c) {
            s.top[r * 10 + c] = 100.0 + 0.5 * r;
            s.base[r * 10 + c] = 40.0 + 2.0 * c;
        }
    }
    const Grid g = Grid::build(s);
    for (int r = 0; r < 10; ++r) {
        for (int c = 0; c < 10; ++c) {
            const double top = 100.0 + 0.5 * r;
            const double base = 40.0 + 2.0 * c;
            const double t = top - base;
            CHECK(g.bottom(0, r, c) == doctest::Approx(top - 0.25 * t));
            CHECK(g.bottom(1, r, c) == doctest::Approx(top - 0.5 * t));
            CHECK(g.bottom(2, r, c) == doctest::Approx(base));
        }
    }
}

TEST_CASE("inactive columns skip the thickness checks") {
    GridSpec s = flat_spec(1, 2, 100.0, 60.0);
    s.active = {1, 0};
    s.base[1] = 100.0;  // degenerate but inactive
    const Grid g = Grid::build(s);
    CHECK(g.is_active(0, 0, 0));
    CHECK_FALSE(g.is_active(0, 0, 1));
    CHECK(g.top_active_layer(0, 1) == -1);
}

TEST_CASE("zone conductivity lookup") {
    ZoneConductivity k;
    k.set(1, 2e-4);
    k.set(3, 5e-3);
    CHECK(k.get(1) == doctest::Approx(2e-4));
    CHECK(k.get(3) == doctest::Approx(5e-3));
    CHECK_FALSE(k.has(2));
    CHECK_THROWS_AS(k.get(2), std::out_of_range);
    CHECK_THROWS_AS(k.set(4, 0.0), std::invalid_argument);
}
