#include "gwcal/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gwcal::optimize {

namespace {

constexpr double kPenaltyBase = 1e6;

double violation(const std::vector<double>& x, const std::vector<double>& lower,
                 const std::vector<double>& upper,
                 const std::vector<Constraint>& constraints) {
    double v = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!lower.empty()) v += std::max(0.0, lower[i] - x[i]);
        if (!upper.empty()) v += std::max(0.0, x[i] - upper[i]);
    }
    for (const auto& c : constraints) v += std::max(0.0, c(x));
    return v;
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& objective,
                             std::vector<double> start,
                             const std::vector<double>& lower,
                             const std::vector<double>& upper,
                             const std::vector<Constraint>& constraints,
                             const NelderMeadOptions& options) {
    const std::size_t n = start.size();
    if (n == 0) throw std::invalid_argument("nelder_mead: empty start point");
    if (!lower.empty() && lower.size() != n)
        throw std::invalid_argument("nelder_mead: lower bound size mismatch");
    if (!upper.empty() && upper.size() != n)
        throw std::invalid_argument("nelder_mead: upper bound size mismatch");

    if (violation(start, lower, upper, constraints) > 0.0)
        throw std::invalid_argument("nelder_mead: infeasible start point");

    const auto score = [&](const std::vector<double>& x) {
        const double v = violation(x, lower, upper, constraints);
        if (v > 0.0) return kPenaltyBase + v * v;
        return objective(x);
    };

    const double f_start = score(start);
    if (!std::isfinite(f_start))
        throw std::invalid_argument(
            "nelder_mead: objective not finite at the start point");

    // vertices[0] is the start point itself.
    std::vector<std::vector<double>> vx(n + 1, start);
    std::vector<double> fx(n + 1);
    fx[0] = f_start;
    for (std::size_t i = 0; i < n; ++i) {
        auto& v = vx[i + 1];
        const double h =
            options.initial_step * std::max(1.0, std::abs(start[i]));
        v[i] += h;
        // step inward when the perturbed vertex leaves the box
        if (!upper.empty() && v[i] > upper[i]) v[i] = start[i] - h;
        fx[i + 1] = score(v);
    }

    constexpr double alpha = 1.0;  // reflection
    constexpr double gamma = 2.0;  // expansion
    constexpr double rho = 0.5;    // contraction
    constexpr double sigma = 0.5;  // shrink

    std::vector<std::size_t> order(n + 1);
    NelderMeadResult result;

    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::stable_sort(
            order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        const std::size_t best = order[0], worst = order[n],
                          second_worst = order[n - 1];

        // convergence: value spread and simplex extent around the best vertex
        const double spread = fx[worst] - fx[best];
        double extent = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t d = 0; d < n; ++d)
                extent = std::max(extent, std::abs(vx[i][d] - vx[best][d]));
        if (spread < options.value_tol && extent < options.size_tol) {
            result.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < n; ++d) centroid[d] += vx[i][d];
        }
        for (std::size_t d = 0; d < n; ++d) centroid[d] /= n;

        auto along = [&](double w) {
            std::vector<double> out(n);
            for (std::size_t d = 0; d < n; ++d)
                out[d] = centroid[d] + w * (centroid[d] - vx[worst][d]);
            return out;
        };

        const auto reflected = along(alpha);
        const double f_reflected = score(reflected);
        if (f_reflected < fx[best]) {
            const auto expanded = along(gamma);
            const double f_expanded = score(expanded);
            if (f_expanded < f_reflected) {
                vx[worst] = expanded;
                fx[worst] = f_expanded;
            } else {
                vx[worst] = reflected;
                fx[worst] = f_reflected;
            }
        } else if (f_reflected < fx[second_worst]) {
            vx[worst] = reflected;
            fx[worst] = f_reflected;
        } else {
            const bool outside = f_reflected < fx[worst];
            std::vector<double> contracted(n);
            for (std::size_t d = 0; d < n; ++d) {
                const double target = outside ? reflected[d] : vx[worst][d];
                contracted[d] = centroid[d] + rho * (target - centroid[d]);
            }
            const double f_contracted = score(contracted);
            if (f_contracted < (outside ? f_reflected : fx[worst])) {
                vx[worst] = contracted;
                fx[worst] = f_contracted;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t d = 0; d < n; ++d)
                        vx[i][d] =
                            vx[best][d] + sigma * (vx[i][d] - vx[best][d]);
                    fx[i] = score(vx[i]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fx[i] < fx[best]) best = i;
    result.x = vx[best];
    result.value = fx[best];
    result.iterations = iter;
    return result;
}

}  // namespace gwcal::optimize
