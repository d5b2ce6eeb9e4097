#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gwcal/boundaries.hpp"
#include "gwcal/calibrate.hpp"
#include "gwcal/grid.hpp"
#include "gwcal/hydrology.hpp"
#include "gwcal/morris.hpp"
#include "gwcal/qoi.hpp"
#include "gwcal/solver.hpp"

namespace gwcal {

/// File locations and scalar settings of one model scenario.
struct ScenarioPaths {
    std::string grid_csv;
    std::string zones_csv;
    std::string boundaries_csv;
    std::string wells_csv;
    std::string basins_csv;
    std::vector<std::string> met_csvs;
};

/// A loaded scenario: grid, boundaries with the precipitation recharge
/// already placed in the rch rows, wells, and the column attributes needed
/// to apply calibration parameters (rice mask, basin ids).
struct Scenario {
    Grid grid;
    BoundarySet boundaries;
    WellSet wells;
    std::vector<int> basin_of_column;       // per column, -1 when unassigned
    std::vector<std::uint8_t> rice_column;  // per column
    std::vector<std::string> basin_ids;     // order used by basin_of_column
    double river_length_m = 0.0;
    double default_drain_conductance = 100.0;

    double rice_area_m2() const;
};

/// Scalar grid settings kept in the run configuration rather than the CSVs.
struct GridSettings {
    double dx = 50.0;
    double dy = 50.0;
    double anisotropy_ratio = 5.0;
    double river_length_m = 0.0;
};

Scenario load_scenario(const ScenarioPaths& paths, const GridSettings& grid);

/// Replaces the precipitation component of the recharge rows by per-basin
/// fluxes (from a recharge summary), keyed through basin_of_column.
void apply_basin_recharge(Scenario& scenario,
                          const std::map<std::string, double>& basin_flux_ms);

/// Hydrology inputs of a scenario.
struct MetBundle {
    std::vector<hydrology::StationSeries> stations;
    std::vector<hydrology::SubBasin> basins;
};

MetBundle load_met(const ScenarioPaths& paths,
                   const std::string& donor_station_id);

/// One forward evaluation of the scenario under named parameter overrides.
///
/// Parameter semantics:
///   K_zone1 / K_zone2 / K_zone3  conductivity of the numbered zone [m/s]
///   R_Irrig   additional recharge on rice columns [m/s]
///   S_Riv     additive offset on river CHD heads [m]
///   H_GHB     additive offset on GHB heads [m]
///   C_D       conductance assigned to every drain [m^2/s]
struct EvalResult {
    SolveResult solve;
    QoIBundle qoi;
    bool ok = false;
    double rice_drain_removal_m3s = 0.0;  // rice-tagged drain outflow
    ZoneConductivity k_used;              // effective zone conductivities
};

class ScenarioModel {
public:
    ScenarioModel(const Scenario& scenario, const ZoneConductivity& default_k,
                  SolverOptions solver);

    EvalResult evaluate(const std::map<std::string, double>& params) const;

    /// Same solve warm-started from a previous head field (used by
    /// sequential evaluation chains; the fixed point is unchanged).
    EvalResult evaluate_from(const std::map<std::string, double>& params,
                             const std::vector<double>& initial_heads) const;

    /// Adapter for the screening engine: returns
    /// [rmse_h, h_pas, gw_flux, head(well 0), ...] or an empty vector when
    /// the solve fails. `names` gives the parameter order of the incoming
    /// vector.
    morris::Model morris_model(const std::vector<std::string>& names,
                               const std::map<std::string, double>& fixed) const;

    std::vector<std::string> morris_qoi_names() const;

    /// Adapter for calibration: named subset of parameters varies, the rest
    /// are fixed.
    calibrate::ForwardModel forward_model(
        const std::vector<std::string>& names,
        const std::map<std::string, double>& fixed) const;

    /// Calibration adapter whose successive calls warm-start from the last
    /// converged head field. Each returned object owns one chain and must be
    /// invoked sequentially (one optimizer run per chain); the first call is
    /// a cold solve.
    calibrate::ForwardModel forward_model_chained(
        const std::vector<std::string>& names,
        const std::map<std::string, double>& fixed) const;

    const Scenario& scenario() const { return scenario_; }
    const SolverOptions& solver() const { return solver_; }

private:
    EvalResult evaluate_impl(const std::map<std::string, double>& params,
                             const std::vector<double>* initial_heads) const;

    const Scenario& scenario_;
    ZoneConductivity default_k_;
    SolverOptions solver_;
};

}  // namespace gwcal
