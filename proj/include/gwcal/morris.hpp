#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace gwcal::morris {

enum class Scale { Linear, Log10 };

struct ParameterDef {
    std::string name;
    double low = 0.0;   // physical units
    double high = 1.0;  // physical units
    Scale scale = Scale::Linear;
    int levels = 6;
};

/// Sampling domain for the screening design. Parameters map to [0, 1] either
/// affinely or affinely in the base-10 exponent, so elementary effects are
/// unit-free and comparable across parameters.
class ParameterSpace {
public:
    explicit ParameterSpace(std::vector<ParameterDef> defs);

    std::size_t size() const { return defs_.size(); }
    const ParameterDef& param(std::size_t i) const { return defs_.at(i); }
    const std::vector<ParameterDef>& params() const { return defs_; }

    double normalize(std::size_t i, double physical) const;
    double denormalize(std::size_t i, double unit) const;
    std::vector<double> normalize(const std::vector<double>& physical) const;
    std::vector<double> denormalize(const std::vector<double>& unit) const;

    /// Physical values of the p quantization levels of one parameter.
    std::vector<double> lattice_levels(std::size_t i) const;

private:
    std::vector<ParameterDef> defs_;
};

/// One-at-a-time path: k+1 points on the level lattice in [0,1]^k, where
/// consecutive points differ in exactly one coordinate by the signed step
/// and every parameter moves exactly once.
struct Trajectory {
    struct Step {
        std::size_t param = 0;
        double delta = 0.0;  // signed, in normalized units
    };
    std::vector<std::vector<double>> points;
    std::vector<Step> steps;
    std::uint64_t seed = 0;     // pool seed this trajectory came from
    std::size_t index = 0;      // position in the generated pool

    /// Checks the construction invariants; throws on violation.
    void check(const ParameterSpace& space) const;
};

/// Standard step size p / (2 (p-1)). Level counts must be even so that
/// stepped points stay on the lattice.
double morris_delta(int levels);

/// Randomly generated candidate paths: per coordinate a random direction and
/// a random feasible lattice level, then a random parameter order.
/// Deterministic for a given seed.
std::vector<Trajectory> generate_pool(const ParameterSpace& space,
                                      std::size_t pool_size,
                                      std::uint64_t seed);

/// Spread measure between two trajectories: sum of squared Euclidean
/// distances over all point pairs.
double trajectory_distance(const Trajectory& a, const Trajectory& b);

/// Total spread of a subset: sum of pairwise trajectory distances.
double selection_criterion(const std::vector<std::vector<double>>& dist,
                           const std::vector<std::size_t>& subset);

enum class SelectionStrategy { ExhaustiveDistance, Greedy };

/// Maximum subset count accepted by the exhaustive strategy.
constexpr std::uint64_t kExhaustiveCap = 2'000'000;

/// Picks r trajectories maximizing the spread criterion. Exhaustive search
/// enumerates every r-subset (capped); the greedy strategy grows candidate
/// sets from high-distance seed pairs by best marginal gain and keeps the
/// best-scoring set. Returns pool indices in ascending order.
std::vector<std::size_t> select_trajectories(
    const std::vector<Trajectory>& pool, std::size_t r,
    SelectionStrategy strategy);

/// Elementary effects of one trajectory for one output: effect of the
/// parameter moved at step s is (f_{s+1} - f_s) / signed step.
std::vector<double> elementary_effects(const Trajectory& t,
                                       const std::vector<double>& qoi_at_points);

struct EffectStats {
    double mu = 0.0;       // mean elementary effect
    double mu_star = 0.0;  // mean absolute elementary effect
    double sigma = 0.0;    // sample standard deviation (n-1)
};

/// Screening statistics for one trajectory count.
struct MorrisResult {
    std::size_t r_requested = 0;
    std::size_t r_effective = 0;  // retained trajectories
    std::size_t r_failed = 0;     // dropped whole (failed model runs)
    std::vector<std::string> qoi_names;
    std::vector<std::vector<EffectStats>> stats;  // [qoi][parameter]
};

/// mu / mu* / sigma across retained trajectories, aggregated in trajectory
/// order. effects is indexed [trajectory][qoi][parameter]; requires at least
/// two retained trajectories.
MorrisResult aggregate(const ParameterSpace& space,
                       const std::vector<std::string>& qoi_names,
                       const std::vector<std::vector<std::vector<double>>>& effects);

/// Parameters ordered by descending mu_star for one output (ties broken by
/// parameter index).
std::vector<std::size_t> ranking(const MorrisResult& result,
                                 std::size_t qoi_index);

/// Black-box model: physical point -> QoI vector. An empty vector or any
/// non-finite entry marks the run as failed.
using Model =
    std::function<std::vector<double>(const std::vector<double>& physical)>;

struct RunOptions {
    std::vector<std::size_t> r_list;
    std::size_t pool_size = 1000;
    std::uint64_t seed = 0;
    SelectionStrategy strategy = SelectionStrategy::Greedy;
    unsigned jobs = 1;
    std::vector<std::string> qoi_names;  // optional; sized on first result
};

/// Full screening run: generate the pool once, then for every requested
/// trajectory count select a subset, evaluate the model at each trajectory
/// point (possibly concurrently; aggregation order is fixed by trajectory
/// index), drop failed trajectories whole, and aggregate.
std::map<std::size_t, MorrisResult> run_morris(const ParameterSpace& space,
                                               const Model& model,
                                               const RunOptions& options);

}  // namespace gwcal::morris
