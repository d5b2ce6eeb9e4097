#pragma once

#include <functional>
#include <vector>

namespace gwcal::optimize {

using Objective = std::function<double(const std::vector<double>&)>;

/// Inequality constraint reported as a violation magnitude: zero when
/// satisfied, positive otherwise.
using Constraint = std::function<double(const std::vector<double>&)>;

struct NelderMeadOptions {
    int max_iterations = 500;
    double value_tol = 1e-8;    // simplex value spread
    double size_tol = 1e-6;     // simplex extent around the best vertex
    double initial_step = 0.05; // first simplex edge length per coordinate
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Downhill simplex minimization (reflection / expansion / contraction /
/// shrink). Bound and constraint violations are scored with a large finite
/// penalty, 1e6 + squared violation, so the simplex can skirt the feasible
/// boundary without evaluating the objective outside it. The start point
/// must be feasible; the returned value never exceeds the start value.
NelderMeadResult nelder_mead(const Objective& objective,
                             std::vector<double> start,
                             const std::vector<double>& lower,
                             const std::vector<double>& upper,
                             const std::vector<Constraint>& constraints,
                             const NelderMeadOptions& options = {});

}  // namespace gwcal::optimize
