#include "gwcal/scenario_gen.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <vector>

#include "gwcal/csv.hpp"
#include "gwcal/hydrology.hpp"
#include "gwcal/rng.hpp"
#include "gwcal/scenario.hpp"
#include "json.hpp"

namespace gwcal::scenario_gen {

namespace fs = std::filesystem;

namespace {

constexpr int kRows = 60;
constexpr int kCols = 40;
constexpr double kCell = 50.0;
constexpr double kTilt = -0.05;       // N-S land slope per row [m]
constexpr double kRiverDepth = 1.8;   // stage below the river-cell surface
constexpr double kBenchLift = 0.82;   // spring-line land above river stage
constexpr double kBenchRise = 0.031;  // extra bench rise per row southwards
constexpr double kGhbDepth = 4.0;     // boundary head below land surface
constexpr double kGhbConductance = 5e-3;     // [m^2/s]
constexpr double kDrainConductance = 100.0;  // [m^2/s]
constexpr double kRicePonding = 0.10;        // [m]
constexpr double kWellNoise = 0.5;           // [m]
constexpr std::uint64_t kWellSeed = 7741;

// truth parameters of the twin (inside the screening ranges)
const std::map<std::string, double> kTruth = {
    {"K_zone1", 2.0e-4}, {"K_zone2", 4.0e-4}, {"K_zone3", 3.0e-3},
    {"R_Irrig", 5.0e-8}, {"S_Riv", 0.0},      {"H_GHB", 0.0},
    {"C_D", 100.0}};

double surface_profile(int c) {
    if (c <= 13) return 100.0;
    if (c == 14) return 94.0;
    if (c == 15) return 85.0;
    if (c == 16) return 74.0;  // west spring bench (land set separately)
    if (c >= 17 && c <= 19) return 72.0;
    if (c == 20) return 71.0;  // river corridor
    if (c >= 21 && c <= 23) return 72.0;
    if (c == 24) return 74.0;  // east spring bench
    if (c == 25) return 85.0;
    if (c == 26) return 94.0;
    return 100.0;
}

double land_surface(int r, int c) {
    // The spring-line hollows sit just above the local river stage and climb
    // gently southwards, so the water table emerges along the northern
    // reaches of both benches.
    if (c == 16 || c == 24)
        return (71.0 + kTilt * r) - kRiverDepth + kBenchLift + kBenchRise * r;
    return surface_profile(c) + kTilt * r;
}

double aquifer_base(int r, int c) {
    // thinner column under the valley, thicker under the plains
    return 25.0 + kTilt * r + 0.1 * (surface_profile(c) - 72.0);
}

int zone_of(int layer, int r, int c) {
    const bool ne_block = c >= 27 && c <= 33 && r <= 24;
    if (layer == 0) {
        if (c >= 15 && c <= 25) return 3;
        if (ne_block) return 2;
        return 1;
    }
    if (layer == 1) {
        if (c >= 17 && c <= 23) return 3;
        if (ne_block) return 2;  // the intermediate zone reaches mid depth
        return 1;
    }
    return 1;
}

bool is_rice(int r, int c) {
    const bool block = (c >= 4 && c <= 12) || (c >= 28 && c <= 36);
    return block && (r % 8) < 5;
}

bool is_spring_row(int r) { return r % 4 == 1; }

double river_stage(int r) { return land_surface(r, 20) - kRiverDepth; }

struct WellSite {
    const char* id;
    int layer, row, col;
};

// Plains and transition wells screen layer 1 (layer 0 thins toward the deep
// water table there); valley wells sit in the unconfined top layer. West
// plain wells alternate between rice rows and the gaps between blocks to
// separate the irrigation-recharge signal from the conductivity signal.
const std::vector<WellSite> kWellSites = {
    {"w01", 1, 10, 6},  {"w02", 1, 25, 9},  {"w03", 1, 40, 5},
    {"w04", 1, 52, 11}, {"w05", 1, 18, 3},  {"w06", 1, 33, 8},
    {"w07", 1, 12, 33}, {"w08", 1, 30, 36}, {"w09", 1, 48, 31},
    {"w10", 1, 40, 34}, {"w11", 1, 56, 36}, {"w12", 1, 4, 30},
    {"w13", 1, 9, 32},  {"w14", 1, 14, 28}, {"w15", 1, 20, 31},
    {"w16", 1, 24, 29}, {"w17", 0, 8, 18},  {"w18", 0, 22, 22},
    {"w19", 0, 35, 19}, {"w20", 0, 50, 21}, {"w21", 1, 28, 18},
    {"w22", 1, 45, 22}, {"w23", 1, 20, 15}, {"w24", 1, 38, 25}};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// meteorological stations: nine weeks spanning August and September

struct StationDef {
    const char* id;
    double lat, elev;
    double p_scale;   // wetter in the north
    double t_offset;
    bool has_wind;
};

const std::vector<StationDef> kStations = {
    {"alpha", 45.25, 85.0, 1.10, -0.2, true},
    {"bravo", 45.20, 78.0, 1.00, 0.0, false},  // wind filled from alpha
    {"charlie", 45.15, 72.0, 0.90, 0.3, true}};

const std::vector<const char*> kWeeks = {
    "2014-08-04", "2014-08-11", "2014-08-18", "2014-08-25", "2014-09-01",
    "2014-09-08", "2014-09-15", "2014-09-22", "2014-09-29"};

// weekly domain-scale forcing; August wet and warm, September dry
const double kWeekPrecip[9] = {38.0, 16.0, 52.0, 24.0, 6.0, 0.0, 10.0, 2.0, 4.0};
const double kWeekTmean[9] = {23.5, 24.2, 22.8, 22.0, 20.5, 19.8, 18.6, 17.2, 15.9};
const double kWeekRs[9] = {232.0, 242.0, 215.0, 210.0, 198.0, 192.0, 178.0, 165.0, 150.0};
const double kWeekRh[9] = {68.0, 64.0, 72.0, 70.0, 66.0, 63.0, 69.0, 71.0, 74.0};
const double kWeekWind[9] = {1.1, 1.3, 0.9, 1.0, 1.2, 1.4, 0.8, 1.0, 1.1};

void write_met_files(const fs::path& dir) {
    for (const auto& st : kStations) {
        csv::Writer w((dir / ("met_" + std::string(st.id) + ".csv")).string());
        w.comment("station_id = " + std::string(st.id));
        w.comment("latitude_deg = " + num(st.lat));
        w.comment("elevation_m = " + num(st.elev));
        std::vector<std::string> header{"week_start", "precip_mm", "tmin_c",
                                        "tmax_c",     "tmean_c",   "rh_pct",
                                        "rs_wm2"};
        if (st.has_wind) header.push_back("wind_ms");
        w.row(header);
        for (int i = 0; i < 9; ++i) {
            const double tmean = kWeekTmean[i] + st.t_offset;
            std::vector<std::string> row{
                kWeeks[i],
                num(kWeekPrecip[i] * st.p_scale),
                num(tmean - 5.5),
                num(tmean + 5.5),
                num(tmean),
                num(kWeekRh[i]),
                num(kWeekRs[i])};
            if (st.has_wind) row.push_back(num(kWeekWind[i]));
            w.row(row);
        }
    }
}

struct BasinDef {
    const char* id;
    double cn;
    std::vector<std::pair<const char*, double>> weights;
};

const std::vector<BasinDef> kBasins = {
    {"nw", 73.50, {{"alpha", 0.7}, {"bravo", 0.3}}},
    {"ne", 76.85, {{"alpha", 0.5}, {"bravo", 0.5}}},
    {"sw", 74.16, {{"bravo", 0.4}, {"charlie", 0.6}}},
    {"se", 62.27, {{"bravo", 0.2}, {"charlie", 0.8}}}};

const char* basin_of(int r, int c) {
    if (r < 30) return c < 20 ? "nw" : "ne";
    return c < 20 ? "sw" : "se";
}

void write_basins(const fs::path& dir) {
    csv::Writer w((dir / "basins.csv").string());
    w.row({"basin_id", "name", "area_km2", "cn", "weight_alpha",
           "weight_bravo", "weight_charlie"});
    const double quadrant_km2 =
        (kRows / 2) * (kCols / 2) * kCell * kCell / 1e6;
    for (const auto& b : kBasins) {
        double wa = 0, wb = 0, wc = 0;
        for (const auto& [sid, wt] : b.weights) {
            if (std::string(sid) == "alpha") wa = wt;
            if (std::string(sid) == "bravo") wb = wt;
            if (std::string(sid) == "charlie") wc = wt;
        }
        w.row({b.id, std::string("basin ") + b.id, num(quadrant_km2),
               num(b.cn), num(wa), num(wb), num(wc)});
    }
}

}  // namespace

void write_synthetic_scenario(const std::string& out_dir) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);

    write_met_files(dir);
    write_basins(dir);

    // precipitation recharge per basin from the generated met data
    ScenarioPaths paths;
    paths.grid_csv = (dir / "grid.csv").string();
    paths.zones_csv = (dir / "zones.csv").string();
    paths.boundaries_csv = (dir / "boundaries.csv").string();
    paths.wells_csv = (dir / "wells.csv").string();
    paths.basins_csv = (dir / "basins.csv").string();
    for (const auto& st : kStations)
        paths.met_csvs.push_back(
            (dir / ("met_" + std::string(st.id) + ".csv")).string());

    const MetBundle met = load_met(paths, "alpha");
    std::map<std::string, double> basin_flux;
    for (const auto& basin : met.basins)
        basin_flux[basin.id] =
            hydrology::basin_recharge(basin, met.stations).mean_flux_ms;

    {
        csv::Writer w(paths.grid_csv);
        w.row({"row", "col", "top_m", "base_m", "active", "basin_id", "rice"});
        for (int r = 0; r < kRows; ++r)
            for (int c = 0; c < kCols; ++c)
                w.row({std::to_string(r), std::to_string(c),
                       num(land_surface(r, c)), num(aquifer_base(r, c)), "1",
                       basin_of(r, c), is_rice(r, c) ? "1" : "0"});
    }
    {
        csv::Writer w(paths.zones_csv);
        w.row({"layer", "row", "col", "zone_id"});
        for (int l = 0; l < 3; ++l)
            for (int r = 0; r < kRows; ++r)
                for (int c = 0; c < kCols; ++c)
                    w.row({std::to_string(l), std::to_string(r),
                           std::to_string(c), std::to_string(zone_of(l, r, c))});
    }
    {
        csv::Writer w(paths.boundaries_csv);
        w.row({"type", "layer", "row", "col", "value1", "value2", "tag"});
        // river: fixed stage along the central column
        for (int r = 0; r < kRows; ++r)
            w.row({"chd", "0", std::to_string(r), "20", num(river_stage(r)),
                   "", "river"});
        // lateral general-head boundaries, all layers
        for (int r = 0; r < kRows; ++r) {
            for (const int c : {0, kCols - 1}) {
                for (int l = 0; l < 3; ++l)
                    w.row({"ghb", std::to_string(l), std::to_string(r),
                           std::to_string(c),
                           num(land_surface(r, c) - kGhbDepth),
                           num(kGhbConductance), ""});
            }
        }
        // spring drains along both benches
        for (int r = 0; r < kRows; ++r) {
            if (!is_spring_row(r)) continue;
            for (const int c : {16, 24})
                w.row({"drn", "0", std::to_string(r), std::to_string(c),
                       num(land_surface(r, c)), num(kDrainConductance),
                       "spring"});
        }
        // ponding drains on every rice cell
        for (int r = 0; r < kRows; ++r)
            for (int c = 0; c < kCols; ++c)
                if (is_rice(r, c))
                    w.row({"drn", "0", std::to_string(r), std::to_string(c),
                           num(land_surface(r, c) + kRicePonding),
                           num(kDrainConductance), "rice"});
        // precipitation recharge on every non-river column
        for (int r = 0; r < kRows; ++r)
            for (int c = 0; c < kCols; ++c) {
                if (c == 20) continue;
                w.row({"rch", "0", std::to_string(r), std::to_string(c),
                       num(basin_flux.at(basin_of(r, c))), "", ""});
            }
    }

    // provisional wells (observed = 0) so the scenario loads for the truth run
    {
        csv::Writer w(paths.wells_csv);
        w.row({"well_id", "layer", "row", "col", "observed_head_m"});
        for (const auto& ws : kWellSites)
            w.row({ws.id, std::to_string(ws.layer), std::to_string(ws.row),
                   std::to_string(ws.col), "0"});
    }

    GridSettings gs;
    gs.dx = kCell;
    gs.dy = kCell;
    gs.anisotropy_ratio = 5.0;
    gs.river_length_m = kRows * kCell;
    const Scenario scenario = load_scenario(paths, gs);

    ZoneConductivity default_k;
    default_k.set(1, kTruth.at("K_zone1"));
    default_k.set(2, kTruth.at("K_zone2"));
    default_k.set(3, kTruth.at("K_zone3"));
    SolverOptions solver;
    solver.method = OuterMethod::Newton;

    const ScenarioModel model(scenario, default_k, solver);
    const EvalResult truth_run = model.evaluate(kTruth);
    if (!truth_run.ok)
        throw std::runtime_error(
            "synthetic scenario: the truth solve did not converge");

    // final wells: truth heads plus fixed-seed gaussian noise
    {
        Rng rng(kWellSeed);
        csv::Writer w(paths.wells_csv);
        w.row({"well_id", "layer", "row", "col", "observed_head_m"});
        for (const auto& ws : kWellSites) {
            const double truth_head =
                truth_run.solve
                    .heads[scenario.grid.cell_index(ws.layer, ws.row, ws.col)];
            w.row({ws.id, std::to_string(ws.layer), std::to_string(ws.row),
                   std::to_string(ws.col),
                   num(truth_head + kWellNoise * rng.normal())});
        }
    }

    // run configuration covering all four pipeline stages
    nlohmann::ordered_json cfg;
    cfg["scenario"] = {
        {"grid", "grid.csv"},
        {"zones", "zones.csv"},
        {"boundaries", "boundaries.csv"},
        {"wells", "wells.csv"},
        {"basins", "basins.csv"},
        {"met", {"met_alpha.csv", "met_bravo.csv", "met_charlie.csv"}},
        {"dx", kCell},
        {"dy", kCell},
        {"anisotropy_ratio", 5.0},
        {"river_length_m", gs.river_length_m}};
    cfg["solver"] = {{"method", "picard"},
                     {"max_outer", 200},
                     {"head_tol", 1e-6},
                     {"linear_tol", 1e-10},
                     {"dry_floor", 1e-3}};
    cfg["zones"] = {{"1", kTruth.at("K_zone1")},
                    {"2", kTruth.at("K_zone2")},
                    {"3", kTruth.at("K_zone3")}};
    cfg["parameter_space"] = nlohmann::ordered_json::array(
        {{{"name", "K_zone1"}, {"low", 5e-5}, {"high", 1e-3}, {"scale", "log10"}, {"levels", 6}},
         {{"name", "K_zone2"}, {"low", 5e-5}, {"high", 1e-3}, {"scale", "log10"}, {"levels", 6}},
         {{"name", "K_zone3"}, {"low", 1e-4}, {"high", 1e-2}, {"scale", "log10"}, {"levels", 6}},
         {{"name", "R_Irrig"}, {"low", 1e-10}, {"high", 1e-6}, {"scale", "log10"}, {"levels", 6}},
         {{"name", "S_Riv"}, {"low", -1.0}, {"high", 1.0}, {"scale", "linear"}, {"levels", 6}},
         {{"name", "H_GHB"}, {"low", -2.0}, {"high", 2.0}, {"scale", "linear"}, {"levels", 6}},
         {{"name", "C_D"}, {"low", 0.1}, {"high", 100.0}, {"scale", "log10"}, {"levels", 6}}});
    cfg["morris"] = {{"r_list", {30, 50}},
                     {"pool_size", 1000},
                     {"seed", 20140901},
                     {"strategy", "greedy"}};

    nlohmann::ordered_json grid_values;
    grid_values["K_zone1"] = {1.00e-3, 8.07e-4, 6.52e-4, 5.26e-4, 4.25e-4,
                              3.43e-4, 2.77e-4, 2.24e-4, 1.81e-4, 1.46e-4,
                              1.18e-4, 9.50e-5, 7.67e-5, 6.19e-5, 5.00e-5};
    grid_values["K_zone2"] = {1.00e-3, 3.68e-4, 1.36e-4, 5.00e-5};
    grid_values["K_zone3"] = {1.00e-2, 7.20e-3, 5.18e-3, 3.73e-3, 2.68e-3,
                              1.93e-3, 1.39e-3, 1.00e-3, 7.20e-4, 5.18e-4,
                              3.73e-4, 2.68e-4, 1.93e-4, 1.39e-4, 1.00e-4};
    grid_values["R_Irrig"] = {1.00e-6, 6.16e-7, 3.79e-7, 2.34e-7, 1.44e-7,
                              8.86e-8, 5.46e-8, 3.36e-8, 2.07e-8, 1.27e-8,
                              7.85e-9, 4.83e-9, 2.98e-9, 1.83e-9, 1.13e-9,
                              6.95e-10, 4.28e-10, 2.64e-10, 1.62e-10,
                              1.00e-10};
    cfg["calibration"] = {
        {"grid", grid_values},
        {"constraints",
         {"K_zone3>=K_zone1", "K_zone3>=K_zone2", "K_zone2>=K_zone1"}},
        {"fixed", {{"S_Riv", 0.0}, {"H_GHB", 0.0}, {"C_D", 100.0}}},
        {"nll", {{"h_pas_ref", 1.0}, {"sigma_hpas", 0.3}}},
        {"sigma_scan", {{"count", 50}, {"low", 0.98}, {"high", 4.5}}},
        {"seeds", 15},
        {"truth",
         {{"K_zone1", kTruth.at("K_zone1")},
          {"K_zone2", kTruth.at("K_zone2")},
          {"K_zone3", kTruth.at("K_zone3")},
          {"R_Irrig", kTruth.at("R_Irrig")}}}};
    cfg["simulate"] = {{"parameters",
                        {{"K_zone1", kTruth.at("K_zone1")},
                         {"K_zone2", kTruth.at("K_zone2")},
                         {"K_zone3", kTruth.at("K_zone3")},
                         {"R_Irrig", kTruth.at("R_Irrig")},
                         {"S_Riv", 0.0},
                         {"H_GHB", 0.0},
                         {"C_D", 100.0}}}};
    cfg["recharge"] = {{"donor_station", "alpha"}};
    cfg["out_dir"] = "out";

    std::ofstream out(dir / "config.json");
    out << cfg.dump(2) << "\n";
}

}  // namespace gwcal::scenario_gen
