#include "gwcal/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "gwcal/csv.hpp"

namespace gwcal {

double Scenario::rice_area_m2() const {
    double area = 0.0;
    for (std::size_t i = 0; i < rice_column.size(); ++i)
        if (rice_column[i]) area += grid.cell_area();
    return area;
}

namespace {

int find_basin(const std::vector<std::string>& ids, const std::string& id) {
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (ids[i] == id) return static_cast<int>(i);
    return -1;
}

}  // namespace

Scenario load_scenario(const ScenarioPaths& paths, const GridSettings& gs) {
    const csv::Table grid_tab = csv::read_file(paths.grid_csv);
    int nrows = 0, ncols = 0;
    for (std::size_t i = 0; i < grid_tab.rows.size(); ++i) {
        nrows = std::max(nrows, static_cast<int>(grid_tab.integer(i, "row")) + 1);
        ncols = std::max(ncols, static_cast<int>(grid_tab.integer(i, "col")) + 1);
    }
    if (nrows == 0 || ncols == 0)
        throw std::runtime_error("grid file '" + paths.grid_csv + "' is empty");
    if (grid_tab.rows.size() != static_cast<std::size_t>(nrows) * ncols)
        throw std::runtime_error("grid file must list every (row, col) cell");

    GridSpec spec;
    spec.nrows = nrows;
    spec.ncols = ncols;
    spec.dx = gs.dx;
    spec.dy = gs.dy;
    spec.anisotropy_ratio = gs.anisotropy_ratio;
    spec.top.assign(static_cast<std::size_t>(nrows) * ncols, 0.0);
    spec.base.assign(static_cast<std::size_t>(nrows) * ncols, 0.0);
    spec.active.assign(static_cast<std::size_t>(nrows) * ncols, 1);

    Scenario sc;
    sc.basin_of_column.assign(static_cast<std::size_t>(nrows) * ncols, -1);
    sc.rice_column.assign(static_cast<std::size_t>(nrows) * ncols, 0);
    sc.river_length_m = gs.river_length_m;

    const bool has_basin = grid_tab.has_column("basin_id");
    const bool has_rice = grid_tab.has_column("rice");
    for (std::size_t i = 0; i < grid_tab.rows.size(); ++i) {
        const int r = static_cast<int>(grid_tab.integer(i, "row"));
        const int c = static_cast<int>(grid_tab.integer(i, "col"));
        const int idx = r * ncols + c;
        spec.top[idx] = grid_tab.number(i, "top_m");
        spec.base[idx] = grid_tab.number(i, "base_m");
        spec.active[idx] =
            static_cast<std::uint8_t>(grid_tab.integer(i, "active"));
        if (has_rice)
            sc.rice_column[idx] =
                static_cast<std::uint8_t>(grid_tab.integer(i, "rice"));
        if (has_basin) {
            const std::string& b = grid_tab.cell(i, "basin_id");
            if (!b.empty()) {
                int bi = find_basin(sc.basin_ids, b);
                if (bi < 0) {
                    sc.basin_ids.push_back(b);
                    bi = static_cast<int>(sc.basin_ids.size()) - 1;
                }
                sc.basin_of_column[idx] = bi;
            }
        }
    }

    const csv::Table zone_tab = csv::read_file(paths.zones_csv);
    spec.zone_id.assign(static_cast<std::size_t>(3) * nrows * ncols, 0);
    for (std::size_t i = 0; i < zone_tab.rows.size(); ++i) {
        const int l = static_cast<int>(zone_tab.integer(i, "layer"));
        const int r = static_cast<int>(zone_tab.integer(i, "row"));
        const int c = static_cast<int>(zone_tab.integer(i, "col"));
        if (l < 0 || l >= 3 || r < 0 || r >= nrows || c < 0 || c >= ncols)
            throw std::runtime_error("zones file: cell out of range");
        spec.zone_id[(static_cast<std::size_t>(l) * nrows + r) * ncols + c] =
            static_cast<int>(zone_tab.integer(i, "zone_id"));
    }

    sc.grid = Grid::build(spec);

    const csv::Table bc_tab = csv::read_file(paths.boundaries_csv);
    for (std::size_t i = 0; i < bc_tab.rows.size(); ++i) {
        const std::string& type = bc_tab.cell(i, "type");
        CellRef cell{static_cast<int>(bc_tab.integer(i, "layer")),
                     static_cast<int>(bc_tab.integer(i, "row")),
                     static_cast<int>(bc_tab.integer(i, "col"))};
        const double v1 = bc_tab.number(i, "value1");
        const std::string& tag = bc_tab.cell(i, "tag");
        if (type == "chd") {
            sc.boundaries.chd.push_back({cell, v1, tag == "river"});
        } else if (type == "ghb") {
            sc.boundaries.ghb.push_back({cell, v1, bc_tab.number(i, "value2")});
        } else if (type == "drn") {
            const DrainKind kind =
                tag == "rice" ? DrainKind::Rice : DrainKind::Spring;
            sc.boundaries.drn.push_back(
                {cell, v1, bc_tab.number(i, "value2"), kind});
        } else if (type == "rch") {
            sc.boundaries.rch.push_back({cell.row, cell.col, v1});
        } else {
            throw std::runtime_error("boundaries file: unknown type '" + type +
                                     "'");
        }
    }

    const csv::Table well_tab = csv::read_file(paths.wells_csv);
    for (std::size_t i = 0; i < well_tab.rows.size(); ++i) {
        Well w;
        w.id = well_tab.cell(i, "well_id");
        w.cell = {static_cast<int>(well_tab.integer(i, "layer")),
                  static_cast<int>(well_tab.integer(i, "row")),
                  static_cast<int>(well_tab.integer(i, "col"))};
        w.observed_head = well_tab.number(i, "observed_head_m");
        sc.wells.wells.push_back(std::move(w));
    }

    sc.boundaries.validate(sc.grid);
    sc.wells.validate(sc.grid);
    return sc;
}

void apply_basin_recharge(Scenario& sc,
                          const std::map<std::string, double>& basin_flux_ms) {
    for (auto& rc : sc.boundaries.rch) {
        const int bi = sc.basin_of_column[sc.grid.column_index(rc.row, rc.col)];
        if (bi < 0) continue;
        const auto it = basin_flux_ms.find(sc.basin_ids[bi]);
        if (it == basin_flux_ms.end())
            throw std::invalid_argument("no recharge flux for basin '" +
                                        sc.basin_ids[bi] + "'");
        rc.flux = it->second;
    }
}

MetBundle load_met(const ScenarioPaths& paths,
                   const std::string& donor_station_id) {
    MetBundle out;
    static const std::vector<std::string> vars{
        "precip_mm", "tmin_c", "tmax_c", "tmean_c",
        "rh_pct",    "rs_wm2", "wind_ms"};
    for (const auto& path : paths.met_csvs) {
        const csv::Table t = csv::read_file(path);
        hydrology::StationSeries s;
        if (!t.metadata.count("station_id"))
            throw std::runtime_error("met file '" + path +
                                     "' lacks a station_id header");
        s.id = t.metadata.at("station_id");
        s.latitude_deg = std::stod(t.metadata.at("latitude_deg"));
        s.elevation_m = std::stod(t.metadata.at("elevation_m"));
        for (const auto& v : vars)
            if (!t.has_column(v)) s.missing.insert(v);
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            hydrology::WeeklyMet w;
            w.week_start = t.cell(i, "week_start");
            if (!s.missing.count("precip_mm"))
                w.precip_mm = t.number(i, "precip_mm");
            if (!s.missing.count("tmin_c")) w.tmin_c = t.number(i, "tmin_c");
            if (!s.missing.count("tmax_c")) w.tmax_c = t.number(i, "tmax_c");
            if (!s.missing.count("tmean_c")) w.tmean_c = t.number(i, "tmean_c");
            if (!s.missing.count("rh_pct")) w.rh_pct = t.number(i, "rh_pct");
            if (!s.missing.count("rs_wm2")) w.rs_wm2 = t.number(i, "rs_wm2");
            if (!s.missing.count("wind_ms")) w.wind_ms = t.number(i, "wind_ms");
            s.weeks.push_back(std::move(w));
        }
        out.stations.push_back(std::move(s));
    }

    // substitute donor values for any missing variable
    if (!donor_station_id.empty()) {
        const hydrology::StationSeries* donor = nullptr;
        for (const auto& s : out.stations)
            if (s.id == donor_station_id) donor = &s;
        if (!donor)
            throw std::runtime_error("donor station '" + donor_station_id +
                                     "' not found");
        const hydrology::StationSeries donor_copy = *donor;
        for (auto& s : out.stations)
            if (s.id != donor_copy.id && !s.missing.empty())
                s = hydrology::fill_missing(s, donor_copy);
    }
    for (const auto& s : out.stations)
        if (!s.missing.empty())
            throw std::runtime_error(
                "station '" + s.id + "' is missing variable '" +
                *s.missing.begin() + "' and no donor station is configured");

    const csv::Table bt = csv::read_file(paths.basins_csv);
    std::vector<std::string> station_ids;
    for (const auto& s : out.stations) station_ids.push_back(s.id);
    for (std::size_t i = 0; i < bt.rows.size(); ++i) {
        hydrology::SubBasin b;
        b.id = bt.cell(i, "basin_id");
        b.name = bt.has_column("name") ? bt.cell(i, "name") : b.id;
        b.area_km2 = bt.number(i, "area_km2");
        b.cn = bt.number(i, "cn");
        for (const auto& sid : station_ids) {
            const std::string col = "weight_" + sid;
            if (bt.has_column(col)) b.station_weights[sid] = bt.number(i, col);
        }
        b.validate(station_ids);
        out.basins.push_back(std::move(b));
    }
    if (out.basins.empty())
        throw std::runtime_error("basins file has no rows");
    return out;
}

ScenarioModel::ScenarioModel(const Scenario& scenario,
                             const ZoneConductivity& default_k,
                             SolverOptions solver)
    : scenario_(scenario), default_k_(default_k), solver_(solver) {}

EvalResult ScenarioModel::evaluate(
    const std::map<std::string, double>& params) const {
    return evaluate_impl(params, nullptr);
}

EvalResult ScenarioModel::evaluate_from(
    const std::map<std::string, double>& params,
    const std::vector<double>& initial_heads) const {
    return evaluate_impl(params, &initial_heads);
}

EvalResult ScenarioModel::evaluate_impl(
    const std::map<std::string, double>& params,
    const std::vector<double>* initial_heads) const {
    auto get = [&](const std::string& name) -> std::optional<double> {
        const auto it = params.find(name);
        if (it == params.end()) return std::nullopt;
        return it->second;
    };

    ZoneConductivity k = default_k_;
    for (int z = 1; z <= 3; ++z)
        if (const auto v = get("K_zone" + std::to_string(z))) k.set(z, *v);

    BoundarySet bcs = scenario_.boundaries;
    if (const auto s_riv = get("S_Riv"))
        for (auto& b : bcs.chd)
            if (b.river) b.head += *s_riv;
    if (const auto h_ghb = get("H_GHB"))
        for (auto& b : bcs.ghb) b.head += *h_ghb;
    if (const auto c_d = get("C_D"))
        for (auto& b : bcs.drn) b.conductance = *c_d;
    if (const auto r_irrig = get("R_Irrig")) {
        for (int r = 0; r < scenario_.grid.nrows(); ++r)
            for (int c = 0; c < scenario_.grid.ncols(); ++c)
                if (scenario_.rice_column[scenario_.grid.column_index(r, c)])
                    bcs.rch.push_back({r, c, *r_irrig});
    }

    SolverOptions opts = solver_;
    if (initial_heads) opts.initial_heads = *initial_heads;

    EvalResult out;
    out.k_used = k;
    out.solve = solve_steady(scenario_.grid, k, bcs, opts);
    out.ok = out.solve.converged;
    if (out.ok) {
        out.qoi = compute_qoi(scenario_.grid, k, bcs, out.solve,
                              scenario_.wells, scenario_.river_length_m);
        const auto q = apply_drains(scenario_.grid, out.solve.heads, bcs.drn);
        for (std::size_t i = 0; i < bcs.drn.size(); ++i)
            if (bcs.drn[i].kind == DrainKind::Rice)
                out.rice_drain_removal_m3s += q[i];
    }
    return out;
}

std::vector<std::string> ScenarioModel::morris_qoi_names() const {
    std::vector<std::string> names{"rmse_h", "h_pas", "gw_flux"};
    for (const auto& w : scenario_.wells.wells)
        names.push_back("head_well_" + w.id);
    return names;
}

morris::Model ScenarioModel::morris_model(
    const std::vector<std::string>& names,
    const std::map<std::string, double>& fixed) const {
    return [this, names, fixed](const std::vector<double>& x) {
        std::map<std::string, double> params = fixed;
        for (std::size_t i = 0; i < names.size(); ++i) params[names[i]] = x[i];
        const EvalResult res = evaluate(params);
        if (!res.ok) return std::vector<double>{};
        std::vector<double> out{res.qoi.rmse_h, res.qoi.h_pas,
                                res.qoi.gw_flux_per_m};
        out.insert(out.end(), res.qoi.well_heads.begin(),
                   res.qoi.well_heads.end());
        return out;
    };
}

calibrate::ForwardModel ScenarioModel::forward_model(
    const std::vector<std::string>& names,
    const std::map<std::string, double>& fixed) const {
    return [this, names, fixed](const std::vector<double>& x) {
        std::map<std::string, double> params = fixed;
        for (std::size_t i = 0; i < names.size(); ++i) params[names[i]] = x[i];
        const EvalResult res = evaluate(params);
        calibrate::ModelOutput out;
        out.ok = res.ok;
        if (res.ok) {
            out.well_heads = res.qoi.well_heads;
            out.h_pas = res.qoi.h_pas;
        }
        return out;
    };
}

calibrate::ForwardModel ScenarioModel::forward_model_chained(
    const std::vector<std::string>& names,
    const std::map<std::string, double>& fixed) const {
    auto last_heads = std::make_shared<std::vector<double>>();
    return [this, names, fixed, last_heads](const std::vector<double>& x) {
        std::map<std::string, double> params = fixed;
        for (std::size_t i = 0; i < names.size(); ++i) params[names[i]] = x[i];
        const EvalResult res = last_heads->empty()
                                   ? evaluate(params)
                                   : evaluate_from(params, *last_heads);
        calibrate::ModelOutput out;
        out.ok = res.ok;
        if (res.ok) {
            out.well_heads = res.qoi.well_heads;
            out.h_pas = res.qoi.h_pas;
            *last_heads = res.solve.heads;
        }
        return out;
    };
}

}  // namespace gwcal
