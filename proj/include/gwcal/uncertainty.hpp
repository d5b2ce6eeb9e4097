#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "gwcal/calibrate.hpp"

namespace gwcal::uq {

/// Residual vector of a least-squares-shaped objective: 1/2 |e(x)|^2 plus
/// x-independent terms.
using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Gauss-Newton covariance: central-difference Jacobian J of the residual
/// vector, H = J^T J, covariance = H^{-1}. Throws when H is not positive
/// definite, reporting the flat or saddle eigen-direction.
Eigen::MatrixXd gauss_newton_covariance(const ResidualFn& residuals,
                                        const Eigen::VectorXd& x,
                                        double fd_step = 1e-3);

struct ParameterUncertainty {
    std::vector<std::string> names;
    std::vector<double> std_transformed;  // in optimization coordinates
    std::vector<double> std_physical;     // chain-ruled to physical units
    std::vector<std::pair<double, double>> range_2sigma;  // physical
};

/// Residual uncertainty of a calibration optimum. Builds the weighted
/// residual vector of the quadratic metric terms (head misfits over sigma_h,
/// surface-exceedance misfit over sigma_hpas), differentiates it centrally in
/// the transformed coordinates, and inverts the Gauss-Newton Hessian. The
/// physical standard deviation of log10-scaled parameters applies
/// d(10^t)/dt = ln(10) * value.
ParameterUncertainty residual_uncertainty(
    const calibrate::ForwardModel& model,
    const std::vector<double>& optimum_params,
    const std::vector<double>& heads_obs, const calibrate::NLLConfig& cfg,
    const std::vector<std::string>& names, const std::vector<bool>& log10_scale,
    double fd_step = 1e-3);

}  // namespace gwcal::uq
