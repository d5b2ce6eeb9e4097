#include "gwcal/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

namespace gwcal {

double saturated_thickness(const Grid& grid, int layer, int row, int col,
                           double head, double dry_floor) {
    const double top = grid.cell_top(layer, row, col);
    const double bot = grid.bottom(layer, row, col);
    const double b = std::min(head, top) - bot;
    return std::max(b, dry_floor);
}

namespace {

// d(saturated thickness)/d(head): 1 on the unconfined branch, 0 where the
// cell is full or at the dry floor.
double saturated_thickness_slope(const Grid& grid, int layer, int row, int col,
                                 double head, double dry_floor) {
    const double top = grid.cell_top(layer, row, col);
    const double bot = grid.bottom(layer, row, col);
    if (head >= top) return 0.0;
    if (head - bot <= dry_floor) return 0.0;
    return 1.0;
}

double series(double a, double b) {
    const double s = a + b;
    return s > 0.0 ? a * b / s : 0.0;
}

}  // namespace

FaceConductances intercell_conductance(const Grid& grid,
                                       const ZoneConductivity& k,
                                       const std::vector<double>& heads,
                                       double dry_floor) {
    const int nl = grid.nlayers(), nr = grid.nrows(), nc = grid.ncols();
    FaceConductances f;
    f.nrows = nr;
    f.ncols = nc;
    f.nlayers = nl;
    f.x.assign(static_cast<std::size_t>(nl) * nr * std::max(nc - 1, 0), 0.0);
    f.y.assign(static_cast<std::size_t>(nl) * std::max(nr - 1, 0) * nc, 0.0);
    f.z.assign(static_cast<std::size_t>(std::max(nl - 1, 0)) * nr * nc, 0.0);

    auto half_x = [&](int l, int r, int c) {
        const double b = saturated_thickness(grid, l, r, c,
                                             heads[grid.cell_index(l, r, c)],
                                             dry_floor);
        return 2.0 * k.get(grid.zone(l, r, c)) * b * grid.dy() / grid.dx();
    };
    auto half_y = [&](int l, int r, int c) {
        const double b = saturated_thickness(grid, l, r, c,
                                             heads[grid.cell_index(l, r, c)],
                                             dry_floor);
        return 2.0 * k.get(grid.zone(l, r, c)) * b * grid.dx() / grid.dy();
    };
    auto half_z = [&](int l, int r, int c) {
        const double b = saturated_thickness(grid, l, r, c,
                                             heads[grid.cell_index(l, r, c)],
                                             dry_floor);
        const double kv = k.get(grid.zone(l, r, c)) / grid.anisotropy_ratio();
        return 2.0 * kv * grid.cell_area() / b;
    };

    for (int l = 0; l < nl; ++l) {
        for (int r = 0; r < nr; ++r) {
            for (int c = 0; c + 1 < nc; ++c) {
                if (!grid.is_active(l, r, c) || !grid.is_active(l, r, c + 1))
                    continue;
                f.xf(l, r, c) = series(half_x(l, r, c), half_x(l, r, c + 1));
            }
        }
        for (int r = 0; r + 1 < nr; ++r) {
            for (int c = 0; c < nc; ++c) {
                if (!grid.is_active(l, r, c) || !grid.is_active(l, r + 1, c))
                    continue;
                f.yf(l, r, c) = series(half_y(l, r, c), half_y(l, r + 1, c));
            }
        }
        if (l + 1 < nl) {
            for (int r = 0; r < nr; ++r) {
                for (int c = 0; c < nc; ++c) {
                    if (!grid.is_active(l, r, c) || !grid.is_active(l + 1, r, c))
                        continue;
                    f.zf(l, r, c) = series(half_z(l, r, c), half_z(l + 1, r, c));
                }
            }
        }
    }
    return f;
}

std::vector<double> apply_drains(const Grid& grid,
                                 const std::vector<double>& heads,
                                 const std::vector<DrainCell>& drains) {
    std::vector<double> q(drains.size(), 0.0);
    for (std::size_t i = 0; i < drains.size(); ++i) {
        const double h = heads[grid.cell_index(drains[i].cell)];
        if (std::isfinite(h))
            q[i] = drains[i].conductance *
                   std::max(0.0, h - drains[i].elevation);
    }
    return q;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct Face {
    int cell_a, cell_b;     // grid cell indices, a < b in traversal order
    int ua, ub;             // unknown indices or -1 (CHD)
    int axis;               // 0=x, 1=y, 2=z
    int la, ra, ca;         // coordinates of cell a (b follows from axis)
};

/// Static problem structure shared by the Picard and Newton paths.
struct System {
    const Grid& grid;
    const ZoneConductivity& k;
    const SolverOptions& opts;

    std::vector<int> unknown;          // per cell: unknown index or -1
    std::vector<int> unknown_cell;     // per unknown: cell index
    std::vector<std::uint8_t> chd;     // per cell
    std::vector<double> fixed;         // per cell: CHD head where chd
    std::vector<Face> faces;
    struct Ghb { int u; double c, hb; };
    struct Drn { int u; double c, z; };
    std::vector<Ghb> ghbs;
    std::vector<Drn> drns;
    std::vector<double> recharge;      // per unknown [m^3/s]
    double recharge_total = 0.0;

    int n() const { return static_cast<int>(unknown_cell.size()); }

    System(const Grid& g, const ZoneConductivity& kk, const BoundarySet& bcs,
           const SolverOptions& o)
        : grid(g), k(kk), opts(o) {
        const int ncells = g.ncells();
        unknown.assign(ncells, -1);
        chd.assign(ncells, 0);
        fixed.assign(ncells, 0.0);

        if (bcs.chd.empty() && bcs.ghb.empty())
            throw std::invalid_argument(
                "solve_steady: no CHD or GHB cell; system is singular");

        for (const auto& b : bcs.chd) {
            const int idx = g.cell_index(b.cell);
            chd[idx] = 1;
            fixed[idx] = b.head;
        }
        for (int l = 0; l < g.nlayers(); ++l)
            for (int r = 0; r < g.nrows(); ++r)
                for (int c = 0; c < g.ncols(); ++c) {
                    const int idx = g.cell_index(l, r, c);
                    if (g.is_active(l, r, c) && !chd[idx]) {
                        unknown[idx] = static_cast<int>(unknown_cell.size());
                        unknown_cell.push_back(idx);
                    }
                }

        // Face list over active pairs with at least one unknown side.
        for (int l = 0; l < g.nlayers(); ++l)
            for (int r = 0; r < g.nrows(); ++r)
                for (int c = 0; c < g.ncols(); ++c) {
                    if (!g.is_active(l, r, c)) continue;
                    const int a = g.cell_index(l, r, c);
                    auto add = [&](int bl, int br, int bc, int axis) {
                        if (!g.is_active(bl, br, bc)) return;
                        const int b = g.cell_index(bl, br, bc);
                        if (unknown[a] < 0 && unknown[b] < 0) return;
                        faces.push_back(
                            {a, b, unknown[a], unknown[b], axis, l, r, c});
                    };
                    if (c + 1 < g.ncols()) add(l, r, c + 1, 0);
                    if (r + 1 < g.nrows()) add(l, r + 1, c, 1);
                    if (l + 1 < g.nlayers()) add(l + 1, r, c, 2);
                }

        recharge.assign(unknown_cell.size(), 0.0);
        for (const auto& rc : bcs.rch) {
            const int tl = g.top_active_layer(rc.row, rc.col);
            if (tl < 0) continue;  // inactive column
            const int idx = g.cell_index(tl, rc.row, rc.col);
            if (chd[idx]) continue;  // fixed head absorbs nothing
            recharge[unknown[idx]] += rc.flux * g.cell_area();
            recharge_total += rc.flux * g.cell_area();
        }
        for (const auto& b : bcs.ghb) {
            const int idx = g.cell_index(b.cell);
            if (chd[idx]) continue;
            ghbs.push_back({unknown[idx], b.conductance, b.head});
        }
        for (const auto& b : bcs.drn) {
            const int idx = g.cell_index(b.cell);
            if (chd[idx]) continue;
            drns.push_back({unknown[idx], b.conductance, b.elevation});
        }
    }

    std::vector<double> initial_heads() const {
        const bool warm =
            opts.initial_heads &&
            opts.initial_heads->size() == static_cast<std::size_t>(grid.ncells());
        std::vector<double> h(grid.ncells(),
                              std::numeric_limits<double>::quiet_NaN());
        for (int l = 0; l < grid.nlayers(); ++l)
            for (int r = 0; r < grid.nrows(); ++r)
                for (int c = 0; c < grid.ncols(); ++c) {
                    if (!grid.is_active(l, r, c)) continue;
                    const int idx = grid.cell_index(l, r, c);
                    if (warm && std::isfinite((*opts.initial_heads)[idx]))
                        h[idx] = (*opts.initial_heads)[idx];
                    else
                        h[idx] = opts.initial_head ? *opts.initial_head
                                                   : grid.land_surface(r, c);
                    if (chd[idx]) h[idx] = fixed[idx];
                }
        return h;
    }

    // Half-cell conductance toward a face of the given axis, and its head
    // derivative.
    void half_conductance(int l, int r, int c, int axis, double head,
                          double& a, double& dadh) const {
        const double b = saturated_thickness(grid, l, r, c, head,
                                             opts.dry_floor);
        const double slope =
            saturated_thickness_slope(grid, l, r, c, head, opts.dry_floor);
        const double kh = k.get(grid.zone(l, r, c));
        if (axis == 0) {
            const double coef = 2.0 * kh * grid.dy() / grid.dx();
            a = coef * b;
            dadh = coef * slope;
        } else if (axis == 1) {
            const double coef = 2.0 * kh * grid.dx() / grid.dy();
            a = coef * b;
            dadh = coef * slope;
        } else {
            const double coef =
                2.0 * (kh / grid.anisotropy_ratio()) * grid.cell_area();
            a = coef / b;
            dadh = -coef / (b * b) * slope;
        }
    }

    void face_cells(const Face& f, int& lb, int& rb, int& cb) const {
        lb = f.la + (f.axis == 2);
        rb = f.ra + (f.axis == 1);
        cb = f.ca + (f.axis == 0);
    }

    /// Residual F_i = net inflow to unknown cell i at heads h [m^3/s].
    void residual(const std::vector<double>& h, Eigen::VectorXd& F) const {
        F.setZero(n());
        for (const auto& f : faces) {
            int lb, rb, cb;
            face_cells(f, lb, rb, cb);
            double aa, ab, da, db;
            half_conductance(f.la, f.ra, f.ca, f.axis, h[f.cell_a], aa, da);
            half_conductance(lb, rb, cb, f.axis, h[f.cell_b], ab, db);
            const double c = series(aa, ab);
            const double flux = c * (h[f.cell_b] - h[f.cell_a]);
            if (f.ua >= 0) F[f.ua] += flux;
            if (f.ub >= 0) F[f.ub] -= flux;
        }
        for (const auto& g : ghbs) F[g.u] += g.c * (g.hb - h[unknown_cell[g.u]]);
        for (const auto& d : drns)
            F[d.u] -= d.c * std::max(0.0, h[unknown_cell[d.u]] - d.z);
        for (int i = 0; i < n(); ++i) F[i] += recharge[i];
    }

    /// Jacobian of the residual, including conductance-head coupling.
    void jacobian(const std::vector<double>& h, SpMat& J) const {
        std::vector<Triplet> trip;
        trip.reserve(faces.size() * 4 + ghbs.size() + drns.size() + n());
        for (const auto& f : faces) {
            int lb, rb, cb;
            face_cells(f, lb, rb, cb);
            double aa, ab, da, db;
            half_conductance(f.la, f.ra, f.ca, f.axis, h[f.cell_a], aa, da);
            half_conductance(lb, rb, cb, f.axis, h[f.cell_b], ab, db);
            const double sum = aa + ab;
            const double c = series(aa, ab);
            const double dt = h[f.cell_b] - h[f.cell_a];
            const double dc_dha = sum > 0 ? (ab / sum) * (ab / sum) * da : 0.0;
            const double dc_dhb = sum > 0 ? (aa / sum) * (aa / sum) * db : 0.0;
            const double dfa_dha = dc_dha * dt - c;
            const double dfa_dhb = dc_dhb * dt + c;
            if (f.ua >= 0) {
                trip.emplace_back(f.ua, f.ua, dfa_dha);
                if (f.ub >= 0) trip.emplace_back(f.ua, f.ub, dfa_dhb);
            }
            if (f.ub >= 0) {
                trip.emplace_back(f.ub, f.ub, -dfa_dhb);
                if (f.ua >= 0) trip.emplace_back(f.ub, f.ua, -dfa_dha);
            }
        }
        for (const auto& g : ghbs) trip.emplace_back(g.u, g.u, -g.c);
        for (const auto& d : drns)
            if (h[unknown_cell[d.u]] > d.z) trip.emplace_back(d.u, d.u, -d.c);
        // Tiny diagonal shift keeps fully-dry isolated cells factorizable.
        for (int i = 0; i < n(); ++i) trip.emplace_back(i, i, -1e-30);
        J.resize(n(), n());
        J.setFromTriplets(trip.begin(), trip.end());
    }

    /// Picard system A h = b with conductances and drain activation lagged
    /// at h_prev.
    void picard_system(const std::vector<double>& h_prev, SpMat& A,
                       Eigen::VectorXd& b) const {
        std::vector<Triplet> trip;
        trip.reserve(faces.size() * 4 + ghbs.size() + drns.size() + n());
        b.setZero(n());
        for (const auto& f : faces) {
            int lb, rb, cb;
            face_cells(f, lb, rb, cb);
            double aa, ab, da, db;
            half_conductance(f.la, f.ra, f.ca, f.axis, h_prev[f.cell_a], aa, da);
            half_conductance(lb, rb, cb, f.axis, h_prev[f.cell_b], ab, db);
            const double c = series(aa, ab);
            if (f.ua >= 0 && f.ub >= 0) {
                trip.emplace_back(f.ua, f.ua, c);
                trip.emplace_back(f.ub, f.ub, c);
                trip.emplace_back(f.ua, f.ub, -c);
                trip.emplace_back(f.ub, f.ua, -c);
            } else if (f.ua >= 0) {
                trip.emplace_back(f.ua, f.ua, c);
                b[f.ua] += c * fixed[f.cell_b];
            } else if (f.ub >= 0) {
                trip.emplace_back(f.ub, f.ub, c);
                b[f.ub] += c * fixed[f.cell_a];
            }
        }
        for (const auto& g : ghbs) {
            trip.emplace_back(g.u, g.u, g.c);
            b[g.u] += g.c * g.hb;
        }
        for (const auto& d : drns) {
            if (h_prev[unknown_cell[d.u]] > d.z) {
                trip.emplace_back(d.u, d.u, d.c);
                b[d.u] += d.c * d.z;
            }
        }
        for (int i = 0; i < n(); ++i) {
            b[i] += recharge[i];
            trip.emplace_back(i, i, 1e-30);
        }
        A.resize(n(), n());
        A.setFromTriplets(trip.begin(), trip.end());
    }

    void scatter(const Eigen::VectorXd& u, std::vector<double>& h) const {
        for (int i = 0; i < n(); ++i) h[unknown_cell[i]] = u[i];
    }
    Eigen::VectorXd gather(const std::vector<double>& h) const {
        Eigen::VectorXd u(n());
        for (int i = 0; i < n(); ++i) u[i] = h[unknown_cell[i]];
        return u;
    }
};

Eigen::VectorXd solve_spd(const SpMat& A, const Eigen::VectorXd& b,
                          const Eigen::VectorXd& guess, double tol) {
    Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(tol);
    cg.setMaxIterations(4 * A.rows() + 100);
    cg.compute(A);
    Eigen::VectorXd x = cg.solveWithGuess(b, guess);
    if (cg.info() == Eigen::Success) return x;
    Eigen::SimplicialLDLT<SpMat> direct(A);
    if (direct.info() != Eigen::Success)
        throw std::runtime_error("solve_steady: inner linear solve failed");
    return direct.solve(b);
}

void compute_budget(const System& sys, const BoundarySet& bcs,
                    const std::vector<double>& h, SolveResult& result) {
    const Grid& g = sys.grid;
    Budget bud;
    bud.rch_in = sys.recharge_total;

    // CHD cells: net exchange with non-CHD active neighbors.
    for (const auto& b : bcs.chd) {
        const int idx = g.cell_index(b.cell);
        double q = 0.0;  // positive: boundary feeds aquifer
        auto face = [&](int l2, int r2, int c2, int axis, int la, int ra,
                        int ca) {
            if (!g.in_bounds({l2, r2, c2}) || !g.is_active(l2, r2, c2)) return;
            const int nb = g.cell_index(l2, r2, c2);
            if (sys.chd[nb]) return;
            double aa, ab, da, db;
            sys.half_conductance(la, ra, ca, axis, h[idx], aa, da);
            sys.half_conductance(l2, r2, c2, axis, h[nb], ab, db);
            q += series(aa, ab) * (h[idx] - h[nb]);
        };
        const int l = b.cell.layer, r = b.cell.row, c = b.cell.col;
        face(l, r, c - 1, 0, l, r, c);
        face(l, r, c + 1, 0, l, r, c);
        face(l, r - 1, c, 1, l, r, c);
        face(l, r + 1, c, 1, l, r, c);
        face(l - 1, r, c, 2, l, r, c);
        face(l + 1, r, c, 2, l, r, c);
        if (q >= 0)
            bud.chd_in += q;
        else
            bud.chd_out -= q;
    }
    for (const auto& gb : sys.ghbs) {
        const double q = gb.c * (gb.hb - h[sys.unknown_cell[gb.u]]);
        if (q >= 0)
            bud.ghb_in += q;
        else
            bud.ghb_out -= q;
    }
    for (const auto& d : sys.drns)
        bud.drn_out += d.c * std::max(0.0, h[sys.unknown_cell[d.u]] - d.z);

    result.budget = bud;
}

}  // namespace

SolveResult solve_steady(const Grid& grid, const ZoneConductivity& k,
                         const BoundarySet& bcs, const SolverOptions& opts) {
    bcs.validate(grid);
    for (int l = 0; l < grid.nlayers(); ++l)
        for (int r = 0; r < grid.nrows(); ++r)
            for (int c = 0; c < grid.ncols(); ++c)
                if (grid.is_active(l, r, c) && !k.has(grid.zone(l, r, c)))
                    throw std::invalid_argument(
                        "solve_steady: active cell without conductivity, zone " +
                        std::to_string(grid.zone(l, r, c)));

    System sys(grid, k, bcs, opts);
    std::vector<double> h = sys.initial_heads();

    SolveResult result;
    result.heads = h;
    if (sys.n() == 0) {  // everything fixed
        result.converged = true;
        result.final_residual = 0.0;
        compute_budget(sys, bcs, h, result);
        return result;
    }

    const bool newton = opts.method == OuterMethod::Newton;
    double damp = 1.0;
    double prev_change = std::numeric_limits<double>::infinity();
    SpMat A;
    Eigen::VectorXd b, F, Fnew;

    Eigen::SparseLU<SpMat> lu;
    bool lu_pattern_set = false;

    auto picard_step = [&](std::vector<double>& heads) {
        sys.picard_system(heads, A, b);
        const Eigen::VectorXd u0 = sys.gather(heads);
        Eigen::VectorXd u = solve_spd(A, b, u0, opts.linear_tol);
        double change = 0.0;
        for (int i = 0; i < sys.n(); ++i) {
            const double next = u0[i] + damp * (u[i] - u0[i]);
            change = std::max(change, std::abs(next - u0[i]));
            heads[sys.unknown_cell[i]] = next;
        }
        return change;
    };

    for (int iter = 1; iter <= opts.max_outer; ++iter) {
        double change = 0.0;
        if (!newton) {
            change = picard_step(h);
        } else {
            sys.residual(h, F);
            const double fnorm = F.norm();
            SpMat J;
            sys.jacobian(h, J);
            if (!lu_pattern_set) {
                lu.analyzePattern(J);
                lu_pattern_set = true;
            }
            lu.factorize(J);
            bool stepped = false;
            if (lu.info() == Eigen::Success) {
                const Eigen::VectorXd delta = lu.solve(-F);
                std::vector<double> trial = h;
                for (double lambda = 1.0; lambda >= 1.0 / 64; lambda *= 0.5) {
                    for (int i = 0; i < sys.n(); ++i)
                        trial[sys.unknown_cell[i]] =
                            h[sys.unknown_cell[i]] + lambda * delta[i];
                    sys.residual(trial, Fnew);
                    if (Fnew.norm() < (1.0 - 1e-4 * lambda) * fnorm) {
                        change = lambda * delta.cwiseAbs().maxCoeff();
                        h = trial;
                        stepped = true;
                        break;
                    }
                }
            }
            if (!stepped) change = picard_step(h);  // fallback
        }

        result.iterations = iter;
        result.final_residual = change;
        if (change < opts.head_tol) {
            result.converged = true;
            break;
        }
        // Simple adaptive damping for the Picard path: back off when the
        // iteration oscillates, recover slowly once it settles.
        if (!newton) {
            if (change > prev_change)
                damp = std::max(0.25, 0.5 * damp);
            else
                damp = std::min(1.0, 1.1 * damp);
        }
        prev_change = change;
    }

    result.heads = h;
    sys.residual(h, F);
    result.max_cell_flux_residual = F.size() ? F.cwiseAbs().maxCoeff() : 0.0;
    compute_budget(sys, bcs, h, result);
    return result;
}

}  // namespace gwcal
