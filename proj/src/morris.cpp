#include "gwcal/morris.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gwcal/rng.hpp"
#include "gwcal/thread_pool.hpp"

namespace gwcal::morris {

ParameterSpace::ParameterSpace(std::vector<ParameterDef> defs)
    : defs_(std::move(defs)) {
    if (defs_.empty())
        throw std::invalid_argument("parameter space must not be empty");
    for (const auto& d : defs_) {
        if (!(d.low < d.high))
            throw std::invalid_argument("parameter '" + d.name +
                                        "': low must be below high");
        if (d.levels < 2)
            throw std::invalid_argument("parameter '" + d.name +
                                        "': at least two levels required");
        if (d.scale == Scale::Log10 && !(d.low > 0.0))
            throw std::invalid_argument("parameter '" + d.name +
                                        "': log scale requires low > 0");
    }
}

double ParameterSpace::normalize(std::size_t i, double physical) const {
    const ParameterDef& d = defs_.at(i);
    constexpr double slack = 1e-9;
    double u;
    if (d.scale == Scale::Linear) {
        u = (physical - d.low) / (d.high - d.low);
    } else {
        if (!(physical > 0.0))
            throw std::domain_error("parameter '" + d.name +
                                    "': non-positive value on log scale");
        u = (std::log10(physical) - std::log10(d.low)) /
            (std::log10(d.high) - std::log10(d.low));
    }
    if (u < -slack || u > 1.0 + slack)
        throw std::domain_error("parameter '" + d.name + "': value " +
                                std::to_string(physical) + " outside range");
    return std::clamp(u, 0.0, 1.0);
}

double ParameterSpace::denormalize(std::size_t i, double unit) const {
    const ParameterDef& d = defs_.at(i);
    constexpr double slack = 1e-9;
    if (unit < -slack || unit > 1.0 + slack)
        throw std::domain_error("parameter '" + d.name +
                                "': normalized coordinate outside [0, 1]");
    const double u = std::clamp(unit, 0.0, 1.0);
    if (d.scale == Scale::Linear) return d.low + u * (d.high - d.low);
    const double e = std::log10(d.low) +
                     u * (std::log10(d.high) - std::log10(d.low));
    return std::pow(10.0, e);
}

std::vector<double> ParameterSpace::normalize(
    const std::vector<double>& physical) const {
    if (physical.size() != size())
        throw std::invalid_argument("normalize: dimension mismatch");
    std::vector<double> u(size());
    for (std::size_t i = 0; i < size(); ++i) u[i] = normalize(i, physical[i]);
    return u;
}

std::vector<double> ParameterSpace::denormalize(
    const std::vector<double>& unit) const {
    if (unit.size() != size())
        throw std::invalid_argument("denormalize: dimension mismatch");
    std::vector<double> x(size());
    for (std::size_t i = 0; i < size(); ++i) x[i] = denormalize(i, unit[i]);
    return x;
}

std::vector<double> ParameterSpace::lattice_levels(std::size_t i) const {
    const int p = defs_.at(i).levels;
    std::vector<double> out(p);
    for (int l = 0; l < p; ++l)
        out[l] = denormalize(i, static_cast<double>(l) / (p - 1));
    return out;
}

double morris_delta(int levels) {
    if (levels < 2 || levels % 2 != 0)
        throw std::invalid_argument(
            "level count must be even and >= 2 for on-lattice steps");
    return levels / (2.0 * (levels - 1));
}

void Trajectory::check(const ParameterSpace& space) const {
    const std::size_t k = space.size();
    if (points.size() != k + 1 || steps.size() != k)
        throw std::logic_error("trajectory: wrong point or step count");
    std::vector<bool> moved(k, false);
    for (std::size_t s = 0; s < steps.size(); ++s) {
        const auto& st = steps[s];
        if (st.param >= k) throw std::logic_error("trajectory: bad parameter");
        if (moved[st.param])
            throw std::logic_error("trajectory: parameter moved twice");
        moved[st.param] = true;
        for (std::size_t i = 0; i < k; ++i) {
            const double diff = points[s + 1][i] - points[s][i];
            if (i == st.param) {
                if (std::abs(diff - st.delta) > 1e-12)
                    throw std::logic_error("trajectory: step size mismatch");
            } else if (diff != 0.0) {
                throw std::logic_error("trajectory: off-axis movement");
            }
        }
    }
    for (const auto& pt : points)
        for (std::size_t i = 0; i < k; ++i) {
            const int p = space.param(i).levels;
            const double scaled = pt[i] * (p - 1);
            if (pt[i] < 0.0 || pt[i] > 1.0 ||
                std::abs(scaled - std::round(scaled)) > 1e-9)
                throw std::logic_error("trajectory: point off the lattice");
        }
}

std::vector<Trajectory> generate_pool(const ParameterSpace& space,
                                      std::size_t pool_size,
                                      std::uint64_t seed) {
    if (pool_size == 0)
        throw std::invalid_argument("generate_pool: pool_size must be >= 1");
    const std::size_t k = space.size();
    Rng rng(seed);
    std::vector<Trajectory> pool;
    pool.reserve(pool_size);

    for (std::size_t t = 0; t < pool_size; ++t) {
        Trajectory traj;
        traj.seed = seed;
        traj.index = t;
        std::vector<double> point(k);
        std::vector<double> delta(k);
        for (std::size_t i = 0; i < k; ++i) {
            const int p = space.param(i).levels;
            const double step = morris_delta(p);
            const bool up = rng.coin();
            // Base level restricted to the half of the lattice from which the
            // chosen direction stays inside [0, 1].
            const int half = p / 2;
            const int level = static_cast<int>(rng.bounded(half)) +
                              (up ? 0 : half);
            point[i] = static_cast<double>(level) / (p - 1);
            delta[i] = up ? step : -step;
        }
        std::vector<std::size_t> order(k);
        for (std::size_t i = 0; i < k; ++i) order[i] = i;
        rng.shuffle(order);

        traj.points.push_back(point);
        for (std::size_t s = 0; s < k; ++s) {
            const std::size_t i = order[s];
            point[i] += delta[i];
            traj.points.push_back(point);
            traj.steps.push_back({i, delta[i]});
        }
        pool.push_back(std::move(traj));
    }
    return pool;
}

double trajectory_distance(const Trajectory& a, const Trajectory& b) {
    double total = 0.0;
    for (const auto& pa : a.points) {
        for (const auto& pb : b.points) {
            double d2 = 0.0;
            for (std::size_t i = 0; i < pa.size(); ++i) {
                const double d = pa[i] - pb[i];
                d2 += d * d;
            }
            total += d2;
        }
    }
    return total;
}

double selection_criterion(const std::vector<std::vector<double>>& dist,
                           const std::vector<std::size_t>& subset) {
    double total = 0.0;
    for (std::size_t a = 0; a < subset.size(); ++a)
        for (std::size_t b = a + 1; b < subset.size(); ++b)
            total += dist[subset[a]][subset[b]];
    return total;
}

namespace {

std::vector<std::vector<double>> distance_matrix(
    const std::vector<Trajectory>& pool) {
    const std::size_t n = pool.size();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            d[a][b] = d[b][a] = trajectory_distance(pool[a], pool[b]);
    return d;
}

std::uint64_t binomial_capped(std::size_t n, std::size_t r,
                              std::uint64_t cap) {
    long double v = 1.0L;
    for (std::size_t i = 0; i < r; ++i) {
        v *= static_cast<long double>(n - i) / static_cast<long double>(i + 1);
        if (v > static_cast<long double>(cap) * 2) return cap * 2;
    }
    return static_cast<std::uint64_t>(v);
}

std::vector<std::size_t> select_exhaustive(
    const std::vector<std::vector<double>>& dist, std::size_t n,
    std::size_t r) {
    if (binomial_capped(n, r, kExhaustiveCap) > kExhaustiveCap)
        throw std::invalid_argument(
            "exhaustive selection exceeds the combination cap; use the "
            "greedy strategy");
    std::vector<std::size_t> subset(r);
    for (std::size_t i = 0; i < r; ++i) subset[i] = i;
    std::vector<std::size_t> best = subset;
    double best_score = selection_criterion(dist, subset);
    while (true) {
        // next combination in lexicographic order
        std::size_t i = r;
        while (i > 0 && subset[i - 1] == n - r + i - 1) --i;
        if (i == 0) break;
        ++subset[i - 1];
        for (std::size_t j = i; j < r; ++j) subset[j] = subset[j - 1] + 1;
        const double score = selection_criterion(dist, subset);
        if (score > best_score) {
            best_score = score;
            best = subset;
        }
    }
    return best;
}

std::vector<std::size_t> grow_greedy(
    const std::vector<std::vector<double>>& dist, std::size_t n,
    std::size_t r, std::size_t seed_a, std::size_t seed_b) {
    std::vector<std::size_t> subset{seed_a, seed_b};
    std::vector<bool> used(n, false);
    used[seed_a] = used[seed_b] = true;
    std::vector<double> gain(n, 0.0);  // criterion gain of adding a candidate
    for (std::size_t c = 0; c < n; ++c)
        gain[c] = dist[c][seed_a] + dist[c][seed_b];
    while (subset.size() < r) {
        std::size_t best = n;
        double best_gain = -1.0;
        for (std::size_t c = 0; c < n; ++c) {
            if (used[c]) continue;
            if (gain[c] > best_gain) {
                best_gain = gain[c];
                best = c;
            }
        }
        used[best] = true;
        subset.push_back(best);
        for (std::size_t c = 0; c < n; ++c) gain[c] += dist[c][best];
    }
    std::sort(subset.begin(), subset.end());
    return subset;
}

std::vector<std::size_t> select_greedy(
    const std::vector<std::vector<double>>& dist, std::size_t n,
    std::size_t r) {
    // Candidate seed pairs: all of them for small pools, otherwise the
    // highest-distance pairs. Each seed pair is grown by best marginal gain
    // and the best-scoring final set wins.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
    const std::size_t max_seeds = 200;
    if (pairs.size() > max_seeds) {
        std::stable_sort(pairs.begin(), pairs.end(),
                         [&](const auto& x, const auto& y) {
                             return dist[x.first][x.second] >
                                    dist[y.first][y.second];
                         });
        pairs.resize(max_seeds);
    }
    std::vector<std::size_t> best;
    double best_score = -1.0;
    for (const auto& [a, b] : pairs) {
        auto subset = grow_greedy(dist, n, r, a, b);
        const double score = selection_criterion(dist, subset);
        if (score > best_score || (score == best_score && subset < best)) {
            best_score = score;
            best = std::move(subset);
        }
    }
    return best;
}

}  // namespace

std::vector<std::size_t> select_trajectories(
    const std::vector<Trajectory>& pool, std::size_t r,
    SelectionStrategy strategy) {
    const std::size_t n = pool.size();
    if (r == 0 || r > n)
        throw std::invalid_argument(
            "select_trajectories: r must be in [1, pool size]");
    if (r == n) {
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        return all;
    }
    if (r == 1) return {0};
    const auto dist = distance_matrix(pool);
    if (strategy == SelectionStrategy::ExhaustiveDistance)
        return select_exhaustive(dist, n, r);
    return select_greedy(dist, n, r);
}

std::vector<double> elementary_effects(const Trajectory& t,
                                       const std::vector<double>& qoi_at_points) {
    if (qoi_at_points.size() != t.points.size())
        throw std::invalid_argument(
            "elementary_effects: one value per trajectory point required");
    for (const double v : qoi_at_points)
        if (!std::isfinite(v))
            throw std::invalid_argument(
                "elementary_effects: non-finite model output");
    std::vector<double> ee(t.points.front().size(), 0.0);
    for (std::size_t s = 0; s < t.steps.size(); ++s)
        ee[t.steps[s].param] =
            (qoi_at_points[s + 1] - qoi_at_points[s]) / t.steps[s].delta;
    return ee;
}

MorrisResult aggregate(
    const ParameterSpace& space, const std::vector<std::string>& qoi_names,
    const std::vector<std::vector<std::vector<double>>>& effects) {
    const std::size_t n = effects.size();
    if (n < 2)
        throw std::invalid_argument(
            "aggregate: at least two retained trajectories required");
    const std::size_t nq = qoi_names.size();
    const std::size_t k = space.size();

    MorrisResult res;
    res.qoi_names = qoi_names;
    res.r_effective = n;
    res.stats.assign(nq, std::vector<EffectStats>(k));
    for (std::size_t q = 0; q < nq; ++q) {
        for (std::size_t p = 0; p < k; ++p) {
            double sum = 0.0, sum_abs = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                const double e = effects[t][q][p];
                sum += e;
                sum_abs += std::abs(e);
            }
            const double mu = sum / static_cast<double>(n);
            double ss = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                const double d = effects[t][q][p] - mu;
                ss += d * d;
            }
            res.stats[q][p].mu = mu;
            res.stats[q][p].mu_star = sum_abs / static_cast<double>(n);
            res.stats[q][p].sigma = std::sqrt(ss / static_cast<double>(n - 1));
        }
    }
    return res;
}

std::vector<std::size_t> ranking(const MorrisResult& result,
                                 std::size_t qoi_index) {
    const auto& row = result.stats.at(qoi_index);
    std::vector<std::size_t> order(row.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return row[a].mu_star > row[b].mu_star;
                     });
    return order;
}

std::map<std::size_t, MorrisResult> run_morris(const ParameterSpace& space,
                                               const Model& model,
                                               const RunOptions& options) {
    if (options.r_list.empty())
        throw std::invalid_argument("run_morris: empty r list");
    const auto pool = generate_pool(space, options.pool_size, options.seed);

    std::map<std::size_t, MorrisResult> out;
    for (const std::size_t r : options.r_list) {
        const auto chosen = select_trajectories(pool, r, options.strategy);

        // Flatten all points of the chosen trajectories for evaluation.
        struct PointRef {
            std::size_t traj, point;
        };
        std::vector<PointRef> refs;
        for (std::size_t t = 0; t < chosen.size(); ++t)
            for (std::size_t p = 0; p < pool[chosen[t]].points.size(); ++p)
                refs.push_back({t, p});

        const std::function<std::vector<double>(std::size_t)> eval =
            [&](std::size_t i) {
                const auto& traj = pool[chosen[refs[i].traj]];
                return model(space.denormalize(traj.points[refs[i].point]));
            };
        const auto values =
            parallel_map<std::vector<double>>(refs.size(), options.jobs, eval);

        // Regroup per trajectory; a trajectory fails if any point failed.
        std::vector<std::vector<std::vector<double>>> per_traj(chosen.size());
        for (std::size_t t = 0; t < chosen.size(); ++t)
            per_traj[t].resize(pool[chosen[t]].points.size());
        for (std::size_t i = 0; i < refs.size(); ++i)
            per_traj[refs[i].traj][refs[i].point] = values[i];

        std::size_t nq = options.qoi_names.size();
        std::vector<std::vector<std::vector<double>>> effects;
        std::size_t failed = 0;
        for (std::size_t t = 0; t < chosen.size(); ++t) {
            bool ok = true;
            for (const auto& v : per_traj[t]) {
                if (v.empty()) ok = false;
                for (const double x : v)
                    if (!std::isfinite(x)) ok = false;
            }
            if (ok && nq == 0) nq = per_traj[t].front().size();
            if (ok)
                for (const auto& v : per_traj[t])
                    if (v.size() != nq) ok = false;
            if (!ok) {
                ++failed;
                continue;
            }
            const auto& traj = pool[chosen[t]];
            std::vector<std::vector<double>> per_qoi(nq);
            for (std::size_t q = 0; q < nq; ++q) {
                std::vector<double> series(traj.points.size());
                for (std::size_t p = 0; p < traj.points.size(); ++p)
                    series[p] = per_traj[t][p][q];
                per_qoi[q] = elementary_effects(traj, series);
            }
            effects.push_back(std::move(per_qoi));
        }

        if (effects.empty())
            throw std::runtime_error("run_morris: every trajectory failed");

        std::vector<std::string> names = options.qoi_names;
        if (names.empty())
            for (std::size_t q = 0; q < nq; ++q)
                names.push_back("qoi" + std::to_string(q));

        MorrisResult res = aggregate(space, names, effects);
        res.r_requested = r;
        res.r_failed = failed;
        out[r] = std::move(res);
    }
    return out;
}

}  // namespace gwcal::morris
