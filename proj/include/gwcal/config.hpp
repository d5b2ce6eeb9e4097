#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gwcal/calibrate.hpp"
#include "gwcal/morris.hpp"
#include "gwcal/scenario.hpp"
#include "gwcal/solver.hpp"

namespace gwcal {

struct MorrisSettings {
    std::vector<std::size_t> r_list;
    std::size_t pool_size = 1000;
    std::uint64_t seed = 0;
    bool seed_set = false;
    morris::SelectionStrategy strategy = morris::SelectionStrategy::Greedy;
};

struct CalibrationSettings {
    std::vector<std::string> names;  // searched parameters, in grid order
    std::vector<std::vector<double>> values;
    std::vector<std::string> constraints;  // "A>=B" over parameter names
    std::map<std::string, double> fixed;   // held-constant parameters
    double h_pas_ref = 1.0;
    double sigma_hpas = 0.3;
    calibrate::SigmaScan sigma_scan;
    std::size_t seeds = 15;
    int refine_max_iterations = 500;
    std::map<std::string, double> truth;  // optional, for twin scenarios
};

/// One run-configuration file: scenario file paths (resolved relative to the
/// config), solver options, parameter space, and the per-command settings.
struct RunConfig {
    ScenarioPaths paths;
    GridSettings grid;
    SolverOptions solver;
    ZoneConductivity default_k;
    std::vector<morris::ParameterDef> space;
    MorrisSettings morris_settings;
    CalibrationSettings calibration;
    std::map<std::string, double> simulate_params;
    std::string recharge_summary;  // optional per-basin flux JSON
    std::string donor_station;
    std::string out_dir = "out";
    unsigned jobs = 0;

    const morris::ParameterDef& space_param(const std::string& name) const;

    /// Constraint predicates over the calibration parameter tuple.
    std::vector<calibrate::BruteForceGrid::Predicate> constraint_predicates()
        const;
};

/// Loads and validates a configuration file. Every referenced file must
/// exist; ranges, seeds, and grids are checked before any solve can start.
RunConfig load_config(const std::string& path);

}  // namespace gwcal
