#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "gwcal/calibrate.hpp"
#include "gwcal/nelder_mead.hpp"
#include "gwcal/rng.hpp"

using namespace gwcal::calibrate;
using gwcal::optimize::nelder_mead;

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Term-by-term transcription used as the independent reference.
double nll_reference(const std::vector<double>& hm,
                     const std::vector<double>& ho, double h_pas,
                     const NLLConfig& c) {
    double t1 = 0.0;
    for (std::size_t i = 0; i < hm.size(); ++i)
        t1 += (hm[i] - ho[i]) * (hm[i] - ho[i]);
    t1 /= 2.0 * c.sigma_h * c.sigma_h;
    const double t2 = (h_pas - c.h_pas_ref) * (h_pas - c.h_pas_ref) /
                      (2.0 * c.sigma_hpas * c.sigma_hpas);
    const double t3 = static_cast<double>(c.n_wells) * std::log(c.sigma_h);
    const double t4 = std::log(c.sigma_hpas);
    const double t5 = (static_cast<double>(c.n_wells) + 1.0) / 2.0 * kLog2Pi;
    return t1 + t2 + t3 + t4 + t5;
}

}  // namespace

TEST_CASE("nll: zero-residual single-well value") {
    NLLConfig cfg{1.0, 1.0, 0.3, 1};
    const double v = nll({5.0}, {5.0}, 1.0, cfg);
    CHECK(v == doctest::Approx(std::log(0.3) + kLog2Pi));
    CHECK(v == doctest::Approx(0.6339).epsilon(1e-4));
}

TEST_CASE("nll: doubling residuals quadruples the head term") {
    NLLConfig cfg{2.0, 1.0, 0.3, 3};
    const std::vector<double> obs{10.0, 11.0, 12.0};
    const std::vector<double> m1{10.5, 10.0, 13.0};
    std::vector<double> m2(3);
    for (int i = 0; i < 3; ++i) m2[i] = obs[i] + 2.0 * (m1[i] - obs[i]);
    const double base = nll(obs, obs, 1.0, cfg);
    CHECK(nll(m2, obs, 1.0, cfg) - base ==
          doctest::Approx(4.0 * (nll(m1, obs, 1.0, cfg) - base)));
}

TEST_CASE("nll: matches the term-by-term reference on random inputs") {
    gwcal::Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.bounded(30);
        NLLConfig cfg;
        cfg.sigma_h = rng.uniform(0.2, 5.0);
        cfg.h_pas_ref = rng.uniform(0.0, 3.0);
        cfg.sigma_hpas = rng.uniform(0.05, 1.0);
        cfg.n_wells = n;
        std::vector<double> hm(n), ho(n);
        for (std::size_t i = 0; i < n; ++i) {
            ho[i] = rng.uniform(50.0, 100.0);
            hm[i] = ho[i] + rng.uniform(-8.0, 8.0);
        }
        const double h_pas = rng.uniform(0.0, 10.0);
        const double a = nll(hm, ho, h_pas, cfg);
        const double b = nll_reference(hm, ho, h_pas, cfg);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)));
    }
}

TEST_CASE("nll: optimal sigma_h equals the rmse for fixed residuals") {
    gwcal::Rng rng(7);
    const std::size_t n = 22;
    std::vector<double> ho(n), hm(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ho[i] = 60.0 + rng.uniform(0.0, 30.0);
        hm[i] = ho[i] + rng.normal() * 2.5;
        ss += (hm[i] - ho[i]) * (hm[i] - ho[i]);
    }
    const double rmse = std::sqrt(ss / n);
    NLLConfig cfg{1.0, 1.0, 0.3, n};

    // golden-section search over sigma_h
    auto f = [&](double s) {
        NLLConfig c = cfg;
        c.sigma_h = s;
        return nll(hm, ho, 1.0, c);
    };
    double a = 0.1, b = 20.0;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c1 = b - phi * (b - a), c2 = a + phi * (b - a);
    for (int it = 0; it < 200; ++it) {
        if (f(c1) < f(c2)) {
            b = c2;
        } else {
            a = c1;
        }
        c1 = b - phi * (b - a);
        c2 = a + phi * (b - a);
    }
    const double argmin = 0.5 * (a + b);
    CHECK(std::abs(argmin - rmse) / rmse < 1e-3);
}

TEST_CASE("nll: shifting all heads by a constant changes nothing") {
    NLLConfig cfg{1.5, 1.0, 0.3, 3};
    const std::vector<double> hm{10.0, 12.0, 14.0}, ho{11.0, 12.5, 13.0};
    std::vector<double> hm2 = hm, ho2 = ho;
    for (auto& v : hm2) v += 123.4;
    for (auto& v : ho2) v += 123.4;
    CHECK(nll(hm, ho, 2.0, cfg) == doctest::Approx(nll(hm2, ho2, 2.0, cfg)));
}

TEST_CASE("nll: mismatched vector lengths are rejected") {
    NLLConfig cfg{1.0, 1.0, 0.3, 2};
    CHECK_THROWS_AS(nll({1.0}, {1.0, 2.0}, 1.0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(nll({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}, 1.0, cfg),
                    std::invalid_argument);
}

namespace {

BruteForceGrid reference_grid() {
    // The four value lists of the production search grid.
    BruteForceGrid g;
    g.names = {"K_zone1", "K_zone2", "K_zone3", "R_Irrig"};
    g.values = {
        {1.00e-3, 8.07e-4, 6.52e-4, 5.26e-4, 4.25e-4, 3.43e-4, 2.77e-4,
         2.24e-4, 1.81e-4, 1.46e-4, 1.18e-4, 9.50e-5, 7.67e-5, 6.19e-5,
         5.00e-5},
        {1.00e-3, 3.68e-4, 1.36e-4, 5.00e-5},
        {1.00e-2, 7.20e-3, 5.18e-3, 3.73e-3, 2.68e-3, 1.93e-3, 1.39e-3,
         1.00e-3, 7.20e-4, 5.18e-4, 3.73e-4, 2.68e-4, 1.93e-4, 1.39e-4,
         1.00e-4},
        {1.00e-6, 6.16e-7, 3.79e-7, 2.34e-7, 1.44e-7, 8.86e-8, 5.46e-8,
         3.36e-8, 2.07e-8, 1.27e-8, 7.85e-9, 4.83e-9, 2.98e-9, 1.83e-9,
         1.13e-9, 6.95e-10, 4.28e-10, 2.64e-10, 1.62e-10, 1.00e-10}};
    g.constraints = {
        [](const std::vector<double>& p) { return p[2] >= p[0]; },
        [](const std::vector<double>& p) { return p[2] >= p[1]; },
        [](const std::vector<double>& p) { return p[1] >= p[0]; }};
    return g;
}

}  // namespace

TEST_CASE("brute-force grid: ordering constraints leave 6300 combinations") {
    const auto tuples = reference_grid().feasible_tuples();
    CHECK(tuples.size() == 6300);
    for (const auto& t : tuples) {
        CHECK(t[2] >= t[0]);
        CHECK(t[2] >= t[1]);
        CHECK(t[1] >= t[0]);
    }
}

TEST_CASE("sigma scan values are equispaced and inclusive") {
    SigmaScan scan;
    const auto v = scan.values();
    REQUIRE(v.size() == 50);
    CHECK(v.front() == doctest::Approx(0.98));
    CHECK(v.back() == doctest::Approx(4.5));
    const double step = v[1] - v[0];
    for (std::size_t i = 1; i < v.size(); ++i)
        CHECK(v[i] - v[i - 1] == doctest::Approx(step));
}

namespace {

// Toy forward model: two "wells" read linear functions of the parameters.
ForwardModel toy_model(const std::vector<double>& obs_center) {
    return [obs_center](const std::vector<double>& p) {
        ModelOutput out;
        out.ok = true;
        out.well_heads = {obs_center[0] + p[0], obs_center[1] + 2.0 * p[1]};
        out.h_pas = 1.0 + 0.5 * p[0];
        return out;
    };
}

}  // namespace

TEST_CASE("brute force: single tuple equals a direct metric evaluation") {
    BruteForceGrid g;
    g.names = {"a", "b"};
    g.values = {{0.4}, {-0.3}};
    const std::vector<double> obs{10.0, 20.0};
    const auto model = toy_model(obs);
    NLLConfig cfg{1.0, 1.0, 0.3, 2};
    SigmaScan scan{50, 0.98, 4.5};
    const auto ranked = brute_force(g, model, obs, scan, cfg, 1);
    REQUIRE(ranked.size() == 1);

    double best = 1e300;
    double best_sigma = 0.0;
    const auto out = model({0.4, -0.3});
    for (const double s : scan.values()) {
        NLLConfig c = cfg;
        c.sigma_h = s;
        const double v = nll(out.well_heads, obs, out.h_pas, c);
        if (v < best) {
            best = v;
            best_sigma = s;
        }
    }
    CHECK(ranked[0].nll == doctest::Approx(best));
    CHECK(ranked[0].sigma_h == doctest::Approx(best_sigma));
}

TEST_CASE("brute force: ranking matches an independent exhaustive loop") {
    BruteForceGrid g;
    g.names = {"a", "b"};
    g.values = {{-1.0, 0.0, 1.0}, {-0.5, 0.5}};
    const std::vector<double> obs{10.0, 20.0};
    const auto model = toy_model(obs);
    NLLConfig cfg{1.0, 1.0, 0.3, 2};
    SigmaScan scan{25, 0.5, 4.0};

    const auto ranked = brute_force(g, model, obs, scan, cfg, 2);
    REQUIRE(ranked.size() == 6);

    // independent loop over tuples and scan values
    std::vector<std::pair<double, std::size_t>> scores;
    std::size_t idx = 0;
    for (const double a : g.values[0]) {
        for (const double b : g.values[1]) {
            const auto out = model({a, b});
            double best = 1e300;
            for (const double s : scan.values()) {
                NLLConfig c = cfg;
                c.sigma_h = s;
                best = std::min(best, nll(out.well_heads, obs, out.h_pas, c));
            }
            scores.emplace_back(best, idx++);
        }
    }
    std::stable_sort(scores.begin(), scores.end());
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(ranked[i].tuple_index == scores[i].second);
        CHECK(ranked[i].nll == doctest::Approx(scores[i].first));
    }
}

TEST_CASE("brute force: all solves failing is an error") {
    BruteForceGrid g;
    g.names = {"a"};
    g.values = {{1.0, 2.0}};
    const ForwardModel model = [](const std::vector<double>&) {
        return ModelOutput{};  // ok = false
    };
    NLLConfig cfg{1.0, 1.0, 0.3, 1};
    CHECK_THROWS_AS(brute_force(g, model, {0.0}, SigmaScan{}, cfg, 1),
                    std::runtime_error);
}

TEST_CASE("nelder-mead: quadratic bowl") {
    const gwcal::optimize::Objective f = [](const std::vector<double>& x) {
        return (x[0] - 2.0) * (x[0] - 2.0) + (x[1] + 1.0) * (x[1] + 1.0);
    };
    const auto res = nelder_mead(f, {0.0, 0.0}, {}, {}, {});
    CHECK(std::abs(res.x[0] - 2.0) < 1e-5);
    CHECK(std::abs(res.x[1] + 1.0) < 1e-5);
    CHECK(res.converged);
}

TEST_CASE("nelder-mead: rosenbrock from the classic start") {
    const gwcal::optimize::Objective f = [](const std::vector<double>& x) {
        const double a = 1.0 - x[0];
        const double b = x[1] - x[0] * x[0];
        return a * a + 100.0 * b * b;
    };
    const auto res = nelder_mead(f, {-1.2, 1.0}, {}, {}, {});
    CHECK(std::abs(res.x[0] - 1.0) < 1e-3);
    CHECK(std::abs(res.x[1] - 1.0) < 1e-3);
}

TEST_CASE("nelder-mead: constrained minimum lands on the boundary") {
    const gwcal::optimize::Objective f = [](const std::vector<double>& x) {
        return (x[0] - 2.0) * (x[0] - 2.0);
    };
    // feasible region: x <= 1, unconstrained minimum at 2
    const gwcal::optimize::Constraint c = [](const std::vector<double>& x) {
        return std::max(0.0, x[0] - 1.0);
    };
    const auto res = nelder_mead(f, {0.0}, {}, {}, {c});
    CHECK(res.x[0] <= 1.0 + 1e-9);
    CHECK(std::abs(res.x[0] - 1.0) < 1e-4);

    // sweep oracle: best feasible value on a fine 1-D grid
    double best = 1e300;
    for (double x = -1.0; x <= 1.0; x += 1e-4)
        best = std::min(best, (x - 2.0) * (x - 2.0));
    CHECK(res.value <= best + 1e-6);
}

TEST_CASE("nelder-mead: infeasible start is rejected") {
    const gwcal::optimize::Objective f = [](const std::vector<double>& x) {
        return x[0] * x[0];
    };
    CHECK_THROWS_AS(nelder_mead(f, {2.0}, {0.0}, {1.0}, {}),
                    std::invalid_argument);
}

TEST_CASE("refine: never increases the metric and keeps a fixed point") {
    const std::vector<double> obs{10.0, 20.0};
    const auto model = toy_model(obs);
    NLLConfig cfg{1.0, 1.0, 0.3, 2};

    RefineSpace space;
    space.names = {"a", "b"};
    space.lower = {-2.0, -2.0};
    space.upper = {2.0, 2.0};
    space.log10_scale = {false, false};

    BruteForceGrid g;
    g.names = space.names;
    g.values = {{-1.0, 0.0, 1.0}, {-0.5, 0.0, 0.5}};
    const auto ranked = brute_force(g, model, obs, SigmaScan{}, cfg, 1);
    const std::vector<BruteForceEntry> seeds(ranked.begin(),
                                             ranked.begin() + 3);
    const auto refined = refine(seeds, model, obs, cfg, space, 2);
    REQUIRE(refined.size() == 3);
    for (const auto& r : refined) {
        CHECK(r.nll <= r.seed.nll + 1e-12);
        CHECK(r.params[0] >= space.lower[0]);
        CHECK(r.params[0] <= space.upper[0]);
    }
    const auto& best = refined[best_result(refined)];
    // the toy optimum: a = 0, b = 0 model heads equal obs, h_pas = ref
    CHECK(std::abs(best.params[0]) < 1e-3);
    CHECK(std::abs(best.params[1]) < 1e-3);
}

TEST_CASE("correct_recharge definitions") {
    CHECK(correct_recharge(5e-8, 1e6, 0.0) == doctest::Approx(5e-8));
    // removing 10% of the applied volume leaves 90% of the rate
    const double applied = 4e-8, area = 2.5e6;
    CHECK(correct_recharge(applied, area, 0.1 * applied * area) ==
          doctest::Approx(0.9 * applied));
    CHECK_THROWS_AS(correct_recharge(1e-8, 0.0, 0.0), std::invalid_argument);
}
