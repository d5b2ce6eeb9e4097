#include "gwcal/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include "gwcal/csv.hpp"
#include "json.hpp"

namespace gwcal::pipeline {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string n(double v) { return csv::format_number(v); }

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

double rmse_of(const std::vector<double>& model,
               const std::vector<double>& obs) {
    double ss = 0.0;
    for (std::size_t i = 0; i < model.size(); ++i) {
        const double r = model[i] - obs[i];
        ss += r * r;
    }
    return std::sqrt(ss / static_cast<double>(model.size()));
}

void write_json(const ordered_json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

}  // namespace

// ------------------------------------------------------------------------ //

RechargeArtifacts run_recharge(const RunConfig& cfg) {
    const MetBundle met = load_met(cfg.paths, cfg.donor_station);
    RechargeArtifacts art;
    art.basins = met.basins;
    for (const auto& s : met.stations)
        if (!s.provenance.empty())
            for (const auto& [var, donor] : s.provenance)
                art.provenance[s.id][var] = donor;
    for (const auto& b : met.basins)
        art.recharge.push_back(hydrology::basin_recharge(b, met.stations));
    art.domain_flux_ms = hydrology::domain_average_flux(art.basins, art.recharge);
    return art;
}

void write_recharge_reports(const RechargeArtifacts& art,
                            const std::string& out_dir) {
    ensure_dir(out_dir);
    {
        csv::Writer w(out_dir + "/recharge_weekly.csv");
        w.row({"basin_id", "week_start", "p_mm", "pe_mm", "pet_mm", "rp_mm"});
        for (const auto& br : art.recharge)
            for (const auto& wk : br.weeks)
                w.row({br.basin_id, wk.week_start, n(wk.p), n(wk.pe),
                       n(wk.pet), n(wk.rp)});
    }
    ordered_json j;
    for (std::size_t i = 0; i < art.basins.size(); ++i) {
        ordered_json b = {{"area_km2", art.basins[i].area_km2},
                          {"cn", art.basins[i].cn},
                          {"mean_flux_ms", art.recharge[i].mean_flux_ms}};
        // weekly recharge summed per calendar month, then averaged over the
        // months of the study period
        std::map<std::string, double> monthly;
        for (const auto& wk : art.recharge[i].weeks)
            monthly[wk.week_start.substr(0, 7)] += wk.rp;
        double total = 0.0;
        for (const auto& [month, sum] : monthly) {
            b["monthly_rp_mm"][month] = sum;
            total += sum;
        }
        b["period_average_mm_per_month"] =
            monthly.empty() ? 0.0 : total / static_cast<double>(monthly.size());
        j["basins"][art.basins[i].id] = std::move(b);
    }
    j["domain_average_flux_ms"] = art.domain_flux_ms;
    for (const auto& [station, vars] : art.provenance)
        for (const auto& [var, donor] : vars)
            j["provenance"][station][var] = donor;
    write_json(j, out_dir + "/recharge_summary.json");
}

// ------------------------------------------------------------------------ //

SimulateArtifacts run_simulate(const RunConfig& cfg) {
    SimulateArtifacts art;
    art.scenario = load_scenario(cfg.paths, cfg.grid);
    if (!cfg.recharge_summary.empty()) {
        std::ifstream in(cfg.recharge_summary);
        if (!in)
            throw std::invalid_argument("cannot open recharge summary '" +
                                        cfg.recharge_summary + "'");
        nlohmann::json j;
        in >> j;
        std::map<std::string, double> flux;
        for (const auto& [id, b] : j.at("basins").items())
            flux[id] = b.at("mean_flux_ms").get<double>();
        apply_basin_recharge(art.scenario, flux);
    }
    const ScenarioModel model(art.scenario, cfg.default_k, cfg.solver);
    art.result = model.evaluate(cfg.simulate_params);
    return art;
}

void write_simulate_reports(const RunConfig&, const Scenario& scenario,
                            const EvalResult& result,
                            const std::string& out_dir) {
    ensure_dir(out_dir);
    const Grid& g = scenario.grid;
    {
        csv::Writer w(out_dir + "/heads.csv");
        w.row({"layer", "row", "col", "head_m"});
        for (int l = 0; l < g.nlayers(); ++l)
            for (int r = 0; r < g.nrows(); ++r)
                for (int c = 0; c < g.ncols(); ++c) {
                    if (!g.is_active(l, r, c)) continue;
                    w.row({std::to_string(l), std::to_string(r),
                           std::to_string(c),
                           n(result.solve.heads[g.cell_index(l, r, c)])});
                }
    }
    {
        const Budget& b = result.solve.budget;
        csv::Writer w(out_dir + "/budget.csv");
        w.row({"component", "inflow_m3s", "outflow_m3s"});
        w.row({"chd", n(b.chd_in), n(b.chd_out)});
        w.row({"ghb", n(b.ghb_in), n(b.ghb_out)});
        w.row({"drn", "0", n(b.drn_out)});
        w.row({"rch", n(b.rch_in), "0"});
        w.row({"total", n(b.total_in()), n(b.total_out())});
    }
    {
        // per-boundary-cell flux, positive into the aquifer
        csv::Writer w(out_dir + "/boundary_fluxes.csv");
        w.row({"type", "layer", "row", "col", "flux_m3s"});
        const auto& bcs = scenario.boundaries;
        std::set<int> chd_cells;
        for (const auto& b : bcs.chd) chd_cells.insert(g.cell_index(b.cell));
        // CHD needs the flow to active non-CHD neighbours
        const FaceConductances cond =
            intercell_conductance(g, result.k_used, result.solve.heads);
        for (const auto& b : bcs.chd) {
            const int l = b.cell.layer, r = b.cell.row, c = b.cell.col;
            const int idx = g.cell_index(b.cell);
            double q = 0.0;
            auto add = [&](int l2, int r2, int c2, double fc) {
                if (!g.in_bounds({l2, r2, c2}) || !g.is_active(l2, r2, c2))
                    return;
                const int nb = g.cell_index(l2, r2, c2);
                if (chd_cells.count(nb)) return;
                q += fc * (result.solve.heads[idx] - result.solve.heads[nb]);
            };
            if (c > 0) add(l, r, c - 1, cond.xf(l, r, c - 1));
            if (c + 1 < g.ncols()) add(l, r, c + 1, cond.xf(l, r, c));
            if (r > 0) add(l, r - 1, c, cond.yf(l, r - 1, c));
            if (r + 1 < g.nrows()) add(l, r + 1, c, cond.yf(l, r, c));
            if (l > 0) add(l - 1, r, c, cond.zf(l - 1, r, c));
            if (l + 1 < g.nlayers()) add(l + 1, r, c, cond.zf(l, r, c));
            w.row({"chd", std::to_string(l), std::to_string(r),
                   std::to_string(c), n(q)});
        }
        for (const auto& b : bcs.ghb) {
            const double q =
                b.conductance *
                (b.head - result.solve.heads[g.cell_index(b.cell)]);
            w.row({"ghb", std::to_string(b.cell.layer),
                   std::to_string(b.cell.row), std::to_string(b.cell.col),
                   n(q)});
        }
        const auto drain_q = apply_drains(g, result.solve.heads, bcs.drn);
        for (std::size_t i = 0; i < bcs.drn.size(); ++i) {
            const auto& b = bcs.drn[i];
            w.row({"drn", std::to_string(b.cell.layer),
                   std::to_string(b.cell.row), std::to_string(b.cell.col),
                   n(-drain_q[i])});
        }
        for (const auto& b : bcs.rch) {
            const int tl = g.top_active_layer(b.row, b.col);
            if (tl < 0) continue;
            w.row({"rch", std::to_string(tl), std::to_string(b.row),
                   std::to_string(b.col), n(b.flux * g.cell_area())});
        }
    }
    ordered_json j;
    j["converged"] = result.solve.converged;
    j["iterations"] = result.solve.iterations;
    j["final_residual_m"] = result.solve.final_residual;
    j["mass_balance_error"] = result.solve.budget.relative_error();
    if (result.ok) {
        j["qoi"] = {{"rmse_h_m", result.qoi.rmse_h},
                    {"h_pas_pct", result.qoi.h_pas},
                    {"gw_flux_m3s_per_m", result.qoi.gw_flux_per_m},
                    {"active_drain_pct", result.qoi.active_drain_pct},
                    {"mean_drain_q_ls", result.qoi.mean_drain_q},
                    {"max_drain_q_ls", result.qoi.max_drain_q}};
        j["rice_drain_removal_m3s"] = result.rice_drain_removal_m3s;
    }
    write_json(j, out_dir + "/qoi.json");
}

// ------------------------------------------------------------------------ //

ScreeningArtifacts run_screening(const RunConfig& cfg, unsigned jobs) {
    if (cfg.space.empty())
        throw std::invalid_argument("screening: no parameter space configured");
    if (!cfg.morris_settings.seed_set)
        throw std::invalid_argument(
            "screening: a seed is required for reproducible runs");
    if (cfg.morris_settings.r_list.empty())
        throw std::invalid_argument("screening: empty r list");

    const Scenario scenario = load_scenario(cfg.paths, cfg.grid);
    const ScenarioModel model(scenario, cfg.default_k, cfg.solver);

    ScreeningArtifacts art;
    for (const auto& d : cfg.space) art.parameter_names.push_back(d.name);
    art.qoi_names = model.morris_qoi_names();

    morris::ParameterSpace space(cfg.space);
    morris::RunOptions opt;
    opt.r_list = cfg.morris_settings.r_list;
    opt.pool_size = cfg.morris_settings.pool_size;
    opt.seed = cfg.morris_settings.seed;
    opt.strategy = cfg.morris_settings.strategy;
    opt.jobs = jobs;
    opt.qoi_names = art.qoi_names;
    art.by_r = morris::run_morris(
        space, model.morris_model(art.parameter_names, {}), opt);
    return art;
}

void write_screening_reports(const ScreeningArtifacts& art,
                             const std::string& out_dir) {
    ensure_dir(out_dir);
    {
        csv::Writer w(out_dir + "/morris_results.csv");
        w.row({"r", "qoi", "parameter", "mu", "mu_star", "sigma",
               "r_effective"});
        for (const auto& [r, res] : art.by_r)
            for (std::size_t q = 0; q < art.qoi_names.size(); ++q)
                for (std::size_t p = 0; p < art.parameter_names.size(); ++p)
                    w.row({std::to_string(r), art.qoi_names[q],
                           art.parameter_names[p], n(res.stats[q][p].mu),
                           n(res.stats[q][p].mu_star), n(res.stats[q][p].sigma),
                           std::to_string(res.r_effective)});
    }
    {
        csv::Writer w(out_dir + "/morris_rank_stability.csv");
        std::vector<std::string> header{"qoi", "parameter"};
        for (const auto& [r, res] : art.by_r)
            header.push_back("rank_r" + std::to_string(r));
        w.row(header);
        for (std::size_t q = 0; q < art.qoi_names.size(); ++q) {
            for (std::size_t p = 0; p < art.parameter_names.size(); ++p) {
                std::vector<std::string> row{art.qoi_names[q],
                                             art.parameter_names[p]};
                for (const auto& [r, res] : art.by_r) {
                    const auto order = morris::ranking(res, q);
                    const auto pos =
                        std::find(order.begin(), order.end(), p) -
                        order.begin();
                    row.push_back(std::to_string(pos + 1));
                }
                w.row(row);
            }
        }
    }
}

// ------------------------------------------------------------------------ //

CalibrationArtifacts run_calibration(const RunConfig& cfg, unsigned jobs) {
    if (cfg.calibration.names.empty())
        throw std::invalid_argument("calibration: no search grid configured");
    const Scenario scenario = load_scenario(cfg.paths, cfg.grid);
    const ScenarioModel model(scenario, cfg.default_k, cfg.solver);

    CalibrationArtifacts art;
    for (const auto& w : scenario.wells.wells)
        art.heads_obs.push_back(w.observed_head);

    calibrate::BruteForceGrid grid;
    grid.names = cfg.calibration.names;
    grid.values = cfg.calibration.values;
    grid.constraints = cfg.constraint_predicates();

    // One nominal solve (default zone values, fixed boundary parameters)
    // provides a shared warm start for every tuple: the fixed point is
    // unchanged, the outer iteration just starts closer.
    SolverOptions warm_solver = cfg.solver;
    {
        const EvalResult nominal = model.evaluate(cfg.calibration.fixed);
        if (nominal.ok) warm_solver.initial_heads = nominal.solve.heads;
    }
    const ScenarioModel warm_model(scenario, cfg.default_k, warm_solver);

    const auto forward =
        warm_model.forward_model(cfg.calibration.names, cfg.calibration.fixed);

    calibrate::NLLConfig nll_cfg;
    nll_cfg.h_pas_ref = cfg.calibration.h_pas_ref;
    nll_cfg.sigma_hpas = cfg.calibration.sigma_hpas;
    nll_cfg.n_wells = art.heads_obs.size();

    art.ranked = calibrate::brute_force(grid, forward, art.heads_obs,
                                        cfg.calibration.sigma_scan, nll_cfg,
                                        jobs);

    const std::size_t n_seeds =
        std::min<std::size_t>(cfg.calibration.seeds, art.ranked.size());
    const std::vector<calibrate::BruteForceEntry> seeds(
        art.ranked.begin(), art.ranked.begin() + n_seeds);

    calibrate::RefineSpace rspace;
    rspace.names = cfg.calibration.names;
    for (const auto& name : cfg.calibration.names) {
        const auto& def = cfg.space_param(name);
        rspace.lower.push_back(def.low);
        rspace.upper.push_back(def.high);
        rspace.log10_scale.push_back(def.scale == morris::Scale::Log10);
    }
    rspace.constraints = cfg.constraint_predicates();
    rspace.max_iterations = cfg.calibration.refine_max_iterations;

    // each simplex chain gets a warm-starting model instance
    const calibrate::ForwardModelFactory chain_factory =
        [&warm_model, &cfg](std::size_t) {
            return warm_model.forward_model_chained(cfg.calibration.names,
                                                    cfg.calibration.fixed);
        };
    art.refined = calibrate::refine(seeds, chain_factory, art.heads_obs,
                                    nll_cfg, rspace, jobs);
    art.best_index = calibrate::best_result(art.refined);
    const auto& best = art.refined[art.best_index];

    calibrate::NLLConfig best_cfg = nll_cfg;
    best_cfg.sigma_h = best.sigma_h;
    art.uncertainty = uq::residual_uncertainty(
        forward, best.params, art.heads_obs, best_cfg, rspace.names,
        rspace.log10_scale);

    // full evaluation at the optimum for reporting
    std::map<std::string, double> opt_params = cfg.calibration.fixed;
    for (std::size_t i = 0; i < rspace.names.size(); ++i)
        opt_params[rspace.names[i]] = best.params[i];
    art.best_eval = model.evaluate(opt_params);

    for (std::size_t i = 0; i < rspace.names.size(); ++i) {
        if (rspace.names[i] == "R_Irrig") {
            art.effective_r_irrig = calibrate::correct_recharge(
                best.params[i], scenario.rice_area_m2(),
                art.best_eval.rice_drain_removal_m3s);
        }
    }

    if (!cfg.calibration.truth.empty()) {
        art.truth_recovered = true;
        for (std::size_t i = 0; i < rspace.names.size(); ++i) {
            const auto it = cfg.calibration.truth.find(rspace.names[i]);
            if (it == cfg.calibration.truth.end()) continue;
            const auto& [lo, hi] = art.uncertainty.range_2sigma[i];
            const bool inside = it->second >= lo && it->second <= hi;
            art.truth_within[rspace.names[i]] = inside;
            art.truth_recovered = art.truth_recovered && inside;
        }
    }
    return art;
}

void write_calibration_reports(const RunConfig& cfg,
                               const CalibrationArtifacts& art,
                               const std::string& out_dir) {
    ensure_dir(out_dir);
    const auto& names = cfg.calibration.names;
    {
        csv::Writer w(out_dir + "/bruteforce_results.csv");
        std::vector<std::string> header{"rank", "tuple_index"};
        header.insert(header.end(), names.begin(), names.end());
        header.insert(header.end(),
                      {"sigma_h", "nll", "rmse_h", "h_pas"});
        w.row(header);
        for (std::size_t i = 0; i < art.ranked.size(); ++i) {
            const auto& e = art.ranked[i];
            std::vector<std::string> row{std::to_string(i + 1),
                                         std::to_string(e.tuple_index)};
            for (const double v : e.params) row.push_back(n(v));
            row.push_back(n(e.sigma_h));
            row.push_back(n(e.nll));
            row.push_back(n(rmse_of(e.output.well_heads, art.heads_obs)));
            row.push_back(n(e.output.h_pas));
            w.row(row);
        }
    }
    {
        csv::Writer w(out_dir + "/refinement.csv");
        std::vector<std::string> header{"seed_rank", "seed_tuple_index"};
        for (const auto& nm : names) header.push_back("seed_" + nm);
        header.push_back("seed_sigma_h");
        header.push_back("seed_nll");
        for (const auto& nm : names) header.push_back("refined_" + nm);
        header.insert(header.end(), {"refined_sigma_h", "refined_nll",
                                     "refined_h_pas", "refined_rmse_h",
                                     "iterations", "is_best"});
        w.row(header);
        for (std::size_t i = 0; i < art.refined.size(); ++i) {
            const auto& r = art.refined[i];
            std::vector<std::string> row{
                std::to_string(i + 1), std::to_string(r.seed.tuple_index)};
            for (const double v : r.seed.params) row.push_back(n(v));
            row.push_back(n(r.seed.sigma_h));
            row.push_back(n(r.seed.nll));
            for (const double v : r.params) row.push_back(n(v));
            row.push_back(n(r.sigma_h));
            row.push_back(n(r.nll));
            row.push_back(n(r.output.h_pas));
            row.push_back(n(rmse_of(r.output.well_heads, art.heads_obs)));
            row.push_back(std::to_string(r.iterations));
            row.push_back(i == art.best_index ? "1" : "0");
            w.row(row);
        }
    }
    {
        const auto& best = art.refined[art.best_index];
        csv::Writer w(out_dir + "/ranges.csv");
        w.row({"parameter", "initial_low", "initial_high", "optimum",
               "residual_std", "final_low", "final_high"});
        for (std::size_t i = 0; i < names.size(); ++i) {
            const auto& def = cfg.space_param(names[i]);
            w.row({names[i], n(def.low), n(def.high), n(best.params[i]),
                   n(art.uncertainty.std_physical[i]),
                   n(art.uncertainty.range_2sigma[i].first),
                   n(art.uncertainty.range_2sigma[i].second)});
        }
    }
    ordered_json j;
    const auto& best = art.refined[art.best_index];
    for (std::size_t i = 0; i < names.size(); ++i)
        j["optimum"][names[i]] = best.params[i];
    j["optimum"]["sigma_h"] = best.sigma_h;
    j["nll"] = best.nll;
    if (art.best_eval.ok) {
        j["qoi"] = {{"rmse_h_m", art.best_eval.qoi.rmse_h},
                    {"h_pas_pct", art.best_eval.qoi.h_pas},
                    {"gw_flux_m3s_per_m", art.best_eval.qoi.gw_flux_per_m},
                    {"active_drain_pct", art.best_eval.qoi.active_drain_pct},
                    {"mean_drain_q_ls", art.best_eval.qoi.mean_drain_q},
                    {"max_drain_q_ls", art.best_eval.qoi.max_drain_q}};
    }
    j["effective_r_irrig_ms"] = art.effective_r_irrig;
    j["seeds_refined"] = art.refined.size();
    j["bruteforce_ranked"] = art.ranked.size();
    for (std::size_t i = 0; i < names.size(); ++i) {
        j["uncertainty"][names[i]] = {
            {"std_physical", art.uncertainty.std_physical[i]},
            {"final_low", art.uncertainty.range_2sigma[i].first},
            {"final_high", art.uncertainty.range_2sigma[i].second}};
    }
    if (!art.truth_within.empty()) {
        for (const auto& [name, inside] : art.truth_within)
            j["truth_within_2sigma"][name] = inside;
        j["truth_recovered"] = art.truth_recovered;
    }
    write_json(j, out_dir + "/calibration_summary.json");
}

}  // namespace gwcal::pipeline
