#include "gwcal/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gwcal/nelder_mead.hpp"
#include "gwcal/thread_pool.hpp"

namespace gwcal::calibrate {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)

double sum_squared_residuals(const std::vector<double>& model,
                             const std::vector<double>& obs) {
    double ss = 0.0;
    for (std::size_t i = 0; i < model.size(); ++i) {
        const double r = model[i] - obs[i];
        ss += r * r;
    }
    return ss;
}

double nll_from_parts(double ss_heads, double h_pas, const NLLConfig& cfg) {
    const double dh = h_pas - cfg.h_pas_ref;
    return ss_heads / (2.0 * cfg.sigma_h * cfg.sigma_h) +
           dh * dh / (2.0 * cfg.sigma_hpas * cfg.sigma_hpas) +
           static_cast<double>(cfg.n_wells) * std::log(cfg.sigma_h) +
           std::log(cfg.sigma_hpas) +
           (static_cast<double>(cfg.n_wells) + 1.0) / 2.0 * kLog2Pi;
}

}  // namespace

double nll(const std::vector<double>& heads_model,
           const std::vector<double>& heads_obs, double h_pas,
           const NLLConfig& cfg) {
    if (heads_model.size() != heads_obs.size() ||
        heads_model.size() != cfg.n_wells)
        throw std::invalid_argument(
            "nll: head vectors must both have n_wells entries");
    if (!(cfg.sigma_h > 0.0) || !(cfg.sigma_hpas > 0.0))
        throw std::invalid_argument("nll: sigma values must be positive");
    return nll_from_parts(sum_squared_residuals(heads_model, heads_obs), h_pas,
                          cfg);
}

std::vector<std::vector<double>> BruteForceGrid::feasible_tuples() const {
    if (values.empty())
        throw std::invalid_argument("brute-force grid has no parameters");
    for (const auto& v : values)
        if (v.empty())
            throw std::invalid_argument(
                "brute-force grid has an empty value list");

    std::vector<std::vector<double>> out;
    std::vector<std::size_t> idx(values.size(), 0);
    std::vector<double> tuple(values.size());
    while (true) {
        for (std::size_t i = 0; i < values.size(); ++i)
            tuple[i] = values[i][idx[i]];
        bool ok = true;
        for (const auto& c : constraints)
            if (!c(tuple)) {
                ok = false;
                break;
            }
        if (ok) out.push_back(tuple);
        // advance the odometer, last parameter fastest
        std::size_t d = values.size();
        while (d > 0) {
            if (++idx[d - 1] < values[d - 1].size()) break;
            idx[d - 1] = 0;
            --d;
        }
        if (d == 0) break;
    }
    return out;
}

std::vector<double> SigmaScan::values() const {
    if (count == 0 || !(low > 0.0) || !(high >= low))
        throw std::invalid_argument("sigma scan: bad range");
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = low;
        return out;
    }
    for (std::size_t i = 0; i < count; ++i)
        out[i] = low + (high - low) * static_cast<double>(i) /
                           static_cast<double>(count - 1);
    return out;
}

std::vector<BruteForceEntry> brute_force(const BruteForceGrid& grid,
                                         const ForwardModel& model,
                                         const std::vector<double>& heads_obs,
                                         const SigmaScan& scan,
                                         const NLLConfig& cfg, unsigned jobs) {
    const auto tuples = grid.feasible_tuples();
    if (tuples.empty())
        throw std::invalid_argument(
            "brute_force: no feasible parameter combinations");
    const auto sigmas = scan.values();

    const std::function<ModelOutput(std::size_t)> eval = [&](std::size_t i) {
        return model(tuples[i]);
    };
    const auto outputs = parallel_map<ModelOutput>(tuples.size(), jobs, eval);

    std::vector<BruteForceEntry> entries;
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        if (!outputs[i].ok) continue;  // failed solves are excluded
        if (outputs[i].well_heads.size() != heads_obs.size())
            throw std::runtime_error(
                "brute_force: model returned wrong number of well heads");
        const double ss = sum_squared_residuals(outputs[i].well_heads,
                                                heads_obs);
        BruteForceEntry e;
        e.tuple_index = i;
        e.params = tuples[i];
        e.output = outputs[i];
        e.nll = std::numeric_limits<double>::infinity();
        // sigma_h enters the metric analytically; no re-solve per scan value
        for (const double s : sigmas) {
            NLLConfig c = cfg;
            c.sigma_h = s;
            const double v = nll_from_parts(ss, outputs[i].h_pas, c);
            if (v < e.nll) {
                e.nll = v;
                e.sigma_h = s;
            }
        }
        entries.push_back(std::move(e));
    }
    if (entries.empty())
        throw std::runtime_error("brute_force: every model run failed");

    std::stable_sort(entries.begin(), entries.end(),
                     [](const BruteForceEntry& a, const BruteForceEntry& b) {
                         if (a.nll != b.nll) return a.nll < b.nll;
                         return a.tuple_index < b.tuple_index;
                     });
    return entries;
}

namespace {

std::vector<double> to_transformed(const std::vector<double>& physical,
                                   const RefineSpace& space) {
    std::vector<double> x(physical.size());
    for (std::size_t i = 0; i < physical.size(); ++i)
        x[i] = space.log10_scale[i] ? std::log10(physical[i]) : physical[i];
    return x;
}

std::vector<double> to_physical(const std::vector<double>& transformed,
                                const RefineSpace& space) {
    std::vector<double> p(transformed.size());
    for (std::size_t i = 0; i < transformed.size(); ++i)
        p[i] = space.log10_scale[i] ? std::pow(10.0, transformed[i])
                                    : transformed[i];
    return p;
}

RefineResult refine_one(const BruteForceEntry& seed, const ForwardModel& model,
                        const std::vector<double>& heads_obs,
                        const NLLConfig& cfg, const RefineSpace& space) {
    const std::size_t k = seed.params.size();
    if (space.lower.size() != k || space.upper.size() != k ||
        space.log10_scale.size() != k)
        throw std::invalid_argument("refine: space does not match seed size");

    // variables: transformed parameters, then sigma_h in linear scale
    std::vector<double> start = to_transformed(seed.params, space);
    start.push_back(seed.sigma_h);
    std::vector<double> lower = to_transformed(space.lower, space);
    lower.push_back(space.sigma_lower);
    std::vector<double> upper = to_transformed(space.upper, space);
    upper.push_back(space.sigma_upper);

    std::vector<optimize::Constraint> constraints;
    for (const auto& pred : space.constraints) {
        constraints.push_back([pred, &space](const std::vector<double>& x) {
            std::vector<double> params(x.begin(), x.end() - 1);
            return pred(to_physical(params, space)) ? 0.0 : 1.0;
        });
    }

    const optimize::Objective objective = [&](const std::vector<double>& x) {
        const std::vector<double> params =
            to_physical({x.begin(), x.end() - 1}, space);
        const ModelOutput out = model(params);
        if (!out.ok) return 1e9;  // recoverable: steer away from failed solves
        NLLConfig c = cfg;
        c.sigma_h = x.back();
        return nll(out.well_heads, heads_obs, out.h_pas, c);
    };

    optimize::NelderMeadOptions nm;
    nm.max_iterations = space.max_iterations;
    const auto opt =
        optimize::nelder_mead(objective, start, lower, upper, constraints, nm);

    RefineResult res;
    res.seed = seed;
    res.params = to_physical({opt.x.begin(), opt.x.end() - 1}, space);
    res.sigma_h = opt.x.back();
    res.nll = opt.value;
    res.iterations = opt.iterations;
    res.converged = opt.converged;
    res.output = model(res.params);
    return res;
}

}  // namespace

std::vector<RefineResult> refine(const std::vector<BruteForceEntry>& seeds,
                                 const ForwardModel& model,
                                 const std::vector<double>& heads_obs,
                                 const NLLConfig& cfg, const RefineSpace& space,
                                 unsigned jobs) {
    return refine(
        seeds, [&model](std::size_t) { return model; }, heads_obs, cfg, space,
        jobs);
}

std::vector<RefineResult> refine(const std::vector<BruteForceEntry>& seeds,
                                 const ForwardModelFactory& factory,
                                 const std::vector<double>& heads_obs,
                                 const NLLConfig& cfg, const RefineSpace& space,
                                 unsigned jobs) {
    if (seeds.empty()) throw std::invalid_argument("refine: no seeds");
    const std::function<RefineResult(std::size_t)> one = [&](std::size_t i) {
        const ForwardModel model = factory(i);
        return refine_one(seeds[i], model, heads_obs, cfg, space);
    };
    return parallel_map<RefineResult>(seeds.size(), jobs, one);
}

std::size_t best_result(const std::vector<RefineResult>& results) {
    if (results.empty()) throw std::invalid_argument("best_result: empty");
    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i)
        if (results[i].nll < results[best].nll) best = i;
    return best;
}

double correct_recharge(double applied_rate_ms, double rice_area_m2,
                        double removed_flux_m3s) {
    if (!(rice_area_m2 > 0.0))
        throw std::invalid_argument("correct_recharge: rice area must be > 0");
    return (applied_rate_ms * rice_area_m2 - removed_flux_m3s) / rice_area_m2;
}

}  // namespace gwcal::calibrate
