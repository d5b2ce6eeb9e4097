#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gwcal::calibrate {

/// Weights and counts of the joint error metric.
struct NLLConfig {
    double sigma_h = 1.0;      // head noise standard deviation [m]
    double h_pas_ref = 1.0;    // nominal percent of cells above land surface
    double sigma_hpas = 0.3;   // plausibility width of that percentage
    std::size_t n_wells = 0;
};

/// Negative log likelihood combining head misfit with the surface-exceedance
/// plausibility term:
///   1/(2 sigma_h^2) sum (h_i - h_i*)^2
/// + 1/(2 sigma_HPAS^2) (H_PAS - H_PAS*)^2
/// + n_wells log sigma_h + log sigma_HPAS + (n_wells + 1)/2 log(2 pi).
double nll(const std::vector<double>& heads_model,
           const std::vector<double>& heads_obs, double h_pas,
           const NLLConfig& cfg);

/// One forward model evaluation for calibration purposes.
struct ModelOutput {
    bool ok = false;                 // solver converged
    std::vector<double> well_heads;  // modeled heads at the wells [m]
    double h_pas = 0.0;              // percent of cells above land surface
};

using ForwardModel =
    std::function<ModelOutput(const std::vector<double>& params)>;

/// Explicit Cartesian search grid with feasibility predicates.
struct BruteForceGrid {
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;  // per parameter, physical units
    using Predicate = std::function<bool(const std::vector<double>&)>;
    std::vector<Predicate> constraints;

    /// Cartesian product filtered by the predicates, in lexicographic order
    /// of the value lists.
    std::vector<std::vector<double>> feasible_tuples() const;
};

struct SigmaScan {
    std::size_t count = 50;
    double low = 0.98;
    double high = 4.5;

    std::vector<double> values() const;  // equispaced, inclusive
};

struct BruteForceEntry {
    std::size_t tuple_index = 0;  // position in feasible tuple order
    std::vector<double> params;
    double sigma_h = 0.0;  // scan value minimizing the metric for this tuple
    double nll = 0.0;
    ModelOutput output;
};

/// Evaluates the model once per feasible tuple (possibly concurrently), scans
/// the head-noise level without re-solving, and returns the converged tuples
/// ranked by their best metric value. Ties break by tuple order.
std::vector<BruteForceEntry> brute_force(const BruteForceGrid& grid,
                                         const ForwardModel& model,
                                         const std::vector<double>& heads_obs,
                                         const SigmaScan& scan,
                                         const NLLConfig& cfg, unsigned jobs);

/// Joint refinement setup: per-parameter physical bounds, log10 flags, and
/// ordering constraints expressed on the physical parameter vector.
struct RefineSpace {
    std::vector<std::string> names;
    std::vector<double> lower;         // physical
    std::vector<double> upper;         // physical
    std::vector<bool> log10_scale;     // optimization in log10 where true
    std::vector<BruteForceGrid::Predicate> constraints;
    double sigma_lower = 1e-3;
    double sigma_upper = 1e3;
    int max_iterations = 500;
};

struct RefineResult {
    BruteForceEntry seed;
    std::vector<double> params;  // refined, physical units
    double sigma_h = 0.0;
    double nll = 0.0;
    ModelOutput output;
    int iterations = 0;
    bool converged = false;
};

/// Runs a simplex refinement from every seed jointly over the calibration
/// parameters (log10-transformed where flagged) and sigma_h (linear). The
/// refined metric never exceeds the seed metric. Seeds are processed
/// independently and may run concurrently.
std::vector<RefineResult> refine(const std::vector<BruteForceEntry>& seeds,
                                 const ForwardModel& model,
                                 const std::vector<double>& heads_obs,
                                 const NLLConfig& cfg, const RefineSpace& space,
                                 unsigned jobs);

/// Builds one forward-model instance per refinement chain (lets callers hand
/// each sequential simplex run a warm-starting model).
using ForwardModelFactory = std::function<ForwardModel(std::size_t seed_index)>;

std::vector<RefineResult> refine(const std::vector<BruteForceEntry>& seeds,
                                 const ForwardModelFactory& factory,
                                 const std::vector<double>& heads_obs,
                                 const NLLConfig& cfg, const RefineSpace& space,
                                 unsigned jobs);

/// Index of the best refined result (smallest metric; ties by seed order).
std::size_t best_result(const std::vector<RefineResult>& results);

/// Effective recharge rate over the rice fields once the ponding drains have
/// removed the excess: (applied volume - removed volume) / area.
double correct_recharge(double applied_rate_ms, double rice_area_m2,
                        double removed_flux_m3s);

}  // namespace gwcal::calibrate
