#pragma once

#include <map>
#include <string>
#include <vector>

#include "gwcal/calibrate.hpp"
#include "gwcal/config.hpp"
#include "gwcal/hydrology.hpp"
#include "gwcal/morris.hpp"
#include "gwcal/scenario.hpp"
#include "gwcal/uncertainty.hpp"

namespace gwcal::pipeline {

// ---------------------------------------------------------------------- //
// recharge

struct RechargeArtifacts {
    std::vector<hydrology::SubBasin> basins;
    std::vector<hydrology::BasinRecharge> recharge;  // same order as basins
    double domain_flux_ms = 0.0;
    std::map<std::string, std::map<std::string, std::string>>
        provenance;  // station -> variable -> donor
};

RechargeArtifacts run_recharge(const RunConfig& cfg);
void write_recharge_reports(const RechargeArtifacts& art,
                            const std::string& out_dir);

// ---------------------------------------------------------------------- //
// simulate

struct SimulateArtifacts {
    Scenario scenario;  // as solved (recharge overrides applied)
    EvalResult result;
};

SimulateArtifacts run_simulate(const RunConfig& cfg);
void write_simulate_reports(const RunConfig& cfg, const Scenario& scenario,
                            const EvalResult& result,
                            const std::string& out_dir);

// ---------------------------------------------------------------------- //
// screening

struct ScreeningArtifacts {
    std::map<std::size_t, morris::MorrisResult> by_r;
    std::vector<std::string> parameter_names;
    std::vector<std::string> qoi_names;
};

ScreeningArtifacts run_screening(const RunConfig& cfg, unsigned jobs);
void write_screening_reports(const ScreeningArtifacts& art,
                             const std::string& out_dir);

// ---------------------------------------------------------------------- //
// calibration

struct CalibrationArtifacts {
    std::vector<calibrate::BruteForceEntry> ranked;
    std::vector<calibrate::RefineResult> refined;
    std::size_t best_index = 0;
    uq::ParameterUncertainty uncertainty;
    EvalResult best_eval;
    double effective_r_irrig = 0.0;  // 0 when R_Irrig is not calibrated
    std::vector<double> heads_obs;
    std::map<std::string, bool> truth_within;  // empty without a truth block
    bool truth_recovered = false;
};

CalibrationArtifacts run_calibration(const RunConfig& cfg, unsigned jobs);
void write_calibration_reports(const RunConfig& cfg,
                               const CalibrationArtifacts& art,
                               const std::string& out_dir);

}  // namespace gwcal::pipeline
