#include "gwcal/config.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace gwcal {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string resolve(const fs::path& base, const std::string& rel) {
    if (rel.empty()) return rel;
    const fs::path p(rel);
    return p.is_absolute() ? p.string() : (base / p).string();
}

void require_file(const std::string& path, const std::string& what) {
    if (!fs::exists(path))
        throw std::invalid_argument(what + " file not found: '" + path + "'");
}

morris::Scale parse_scale(const std::string& s) {
    if (s == "linear") return morris::Scale::Linear;
    if (s == "log10") return morris::Scale::Log10;
    throw std::invalid_argument("unknown scale '" + s + "'");
}

OuterMethod parse_method(const std::string& s) {
    if (s == "picard") return OuterMethod::Picard;
    if (s == "newton") return OuterMethod::Newton;
    throw std::invalid_argument("unknown solver method '" + s + "'");
}

}  // namespace

const morris::ParameterDef& RunConfig::space_param(
    const std::string& name) const {
    for (const auto& d : space)
        if (d.name == name) return d;
    throw std::invalid_argument("parameter '" + name +
                                "' is not in the parameter space");
}

std::vector<calibrate::BruteForceGrid::Predicate>
RunConfig::constraint_predicates() const {
    std::vector<calibrate::BruteForceGrid::Predicate> preds;
    for (const auto& text : calibration.constraints) {
        const auto pos = text.find(">=");
        if (pos == std::string::npos)
            throw std::invalid_argument("constraint '" + text +
                                        "' must have the form A>=B");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string()
                                          : s.substr(b, e - b + 1);
        };
        const std::string lhs = trim(text.substr(0, pos));
        const std::string rhs = trim(text.substr(pos + 2));
        auto index_of = [this](const std::string& n) {
            for (std::size_t i = 0; i < calibration.names.size(); ++i)
                if (calibration.names[i] == n) return i;
            throw std::invalid_argument("constraint references unknown "
                                        "parameter '" +
                                        n + "'");
        };
        const std::size_t li = index_of(lhs), ri = index_of(rhs);
        preds.push_back([li, ri](const std::vector<double>& p) {
            return p[li] >= p[ri];
        });
    }
    return preds;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("config '" + path +
                                    "' is not valid JSON: " + e.what());
    }
    const fs::path base = fs::absolute(path).parent_path();

    RunConfig cfg;
    const json& sc = j.at("scenario");
    cfg.paths.grid_csv = resolve(base, sc.at("grid").get<std::string>());
    cfg.paths.zones_csv = resolve(base, sc.at("zones").get<std::string>());
    cfg.paths.boundaries_csv =
        resolve(base, sc.at("boundaries").get<std::string>());
    cfg.paths.wells_csv = resolve(base, sc.at("wells").get<std::string>());
    cfg.paths.basins_csv = resolve(base, sc.at("basins").get<std::string>());
    for (const auto& m : sc.at("met"))
        cfg.paths.met_csvs.push_back(resolve(base, m.get<std::string>()));

    cfg.grid.dx = sc.at("dx").get<double>();
    cfg.grid.dy = sc.at("dy").get<double>();
    cfg.grid.anisotropy_ratio = sc.value("anisotropy_ratio", 5.0);
    cfg.grid.river_length_m = sc.at("river_length_m").get<double>();

    require_file(cfg.paths.grid_csv, "grid");
    require_file(cfg.paths.zones_csv, "zones");
    require_file(cfg.paths.boundaries_csv, "boundaries");
    require_file(cfg.paths.wells_csv, "wells");
    require_file(cfg.paths.basins_csv, "basins");
    for (const auto& m : cfg.paths.met_csvs) require_file(m, "met");

    if (j.contains("solver")) {
        const json& s = j.at("solver");
        cfg.solver.method = parse_method(s.value("method", "newton"));
        cfg.solver.max_outer = s.value("max_outer", 200);
        cfg.solver.head_tol = s.value("head_tol", 1e-6);
        cfg.solver.linear_tol = s.value("linear_tol", 1e-10);
        cfg.solver.dry_floor = s.value("dry_floor", 1e-3);
    }

    if (j.contains("zones")) {
        for (const auto& [key, val] : j.at("zones").items())
            cfg.default_k.set(std::stoi(key), val.get<double>());
    }

    if (j.contains("parameter_space")) {
        for (const auto& p : j.at("parameter_space")) {
            morris::ParameterDef d;
            d.name = p.at("name").get<std::string>();
            d.low = p.at("low").get<double>();
            d.high = p.at("high").get<double>();
            d.scale = parse_scale(p.value("scale", "linear"));
            d.levels = p.value("levels", 6);
            cfg.space.push_back(std::move(d));
        }
    }

    if (j.contains("morris")) {
        const json& m = j.at("morris");
        for (const auto& r : m.at("r_list"))
            cfg.morris_settings.r_list.push_back(r.get<std::size_t>());
        cfg.morris_settings.pool_size = m.value("pool_size", 1000);
        if (m.contains("seed")) {
            cfg.morris_settings.seed = m.at("seed").get<std::uint64_t>();
            cfg.morris_settings.seed_set = true;
        }
        const std::string strat = m.value("strategy", "greedy");
        if (strat == "greedy")
            cfg.morris_settings.strategy = morris::SelectionStrategy::Greedy;
        else if (strat == "exhaustive")
            cfg.morris_settings.strategy =
                morris::SelectionStrategy::ExhaustiveDistance;
        else
            throw std::invalid_argument("unknown selection strategy '" +
                                        strat + "'");
    }

    if (j.contains("calibration")) {
        const json& c = j.at("calibration");
        for (const auto& [name, vals] : c.at("grid").items()) {
            cfg.calibration.names.push_back(name);
            cfg.calibration.values.push_back(vals.get<std::vector<double>>());
        }
        if (c.contains("constraints"))
            cfg.calibration.constraints =
                c.at("constraints").get<std::vector<std::string>>();
        if (c.contains("fixed"))
            for (const auto& [k, v] : c.at("fixed").items())
                cfg.calibration.fixed[k] = v.get<double>();
        const json& n = c.at("nll");
        cfg.calibration.h_pas_ref = n.at("h_pas_ref").get<double>();
        cfg.calibration.sigma_hpas = n.at("sigma_hpas").get<double>();
        if (c.contains("sigma_scan")) {
            const json& s = c.at("sigma_scan");
            cfg.calibration.sigma_scan.count = s.value("count", 50);
            cfg.calibration.sigma_scan.low = s.value("low", 0.98);
            cfg.calibration.sigma_scan.high = s.value("high", 4.5);
        }
        cfg.calibration.seeds = c.value("seeds", 15);
        cfg.calibration.refine_max_iterations =
            c.value("refine_max_iterations", 500);
        if (c.contains("truth"))
            for (const auto& [k, v] : c.at("truth").items())
                cfg.calibration.truth[k] = v.get<double>();
        // validation: every searched parameter needs a space entry for bounds
        for (const auto& name : cfg.calibration.names) cfg.space_param(name);
        cfg.constraint_predicates();
        if (cfg.calibration.names.empty())
            throw std::invalid_argument("calibration grid is empty");
        for (const auto& v : cfg.calibration.values)
            if (v.empty())
                throw std::invalid_argument(
                    "calibration grid has an empty value list");
    }

    if (j.contains("simulate")) {
        const json& s = j.at("simulate");
        if (s.contains("parameters"))
            for (const auto& [k, v] : s.at("parameters").items())
                cfg.simulate_params[k] = v.get<double>();
        if (s.contains("recharge_summary"))
            cfg.recharge_summary =
                resolve(base, s.at("recharge_summary").get<std::string>());
    }

    if (j.contains("recharge"))
        cfg.donor_station = j.at("recharge").value("donor_station", "");

    cfg.out_dir = j.value("out_dir", "out");
    cfg.jobs = j.value("jobs", 0u);
    return cfg;
}

}  // namespace gwcal
