#include "gwcal/uncertainty.hpp"

#include <cmath>
#include <stdexcept>

namespace gwcal::uq {

Eigen::MatrixXd gauss_newton_covariance(const ResidualFn& residuals,
                                        const Eigen::VectorXd& x,
                                        double fd_step) {
    const Eigen::Index n = x.size();
    if (n == 0)
        throw std::invalid_argument("gauss_newton_covariance: empty point");

    const Eigen::VectorXd base = residuals(x);
    const Eigen::Index m = base.size();
    if (m == 0)
        throw std::invalid_argument(
            "gauss_newton_covariance: empty residual vector");

    Eigen::MatrixXd jac(m, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::VectorXd xp = x, xm = x;
        xp[j] += fd_step;
        xm[j] -= fd_step;
        const Eigen::VectorXd rp = residuals(xp);
        const Eigen::VectorXd rm = residuals(xm);
        if (rp.size() != m || rm.size() != m)
            throw std::runtime_error(
                "gauss_newton_covariance: residual size changed during "
                "differentiation");
        jac.col(j) = (rp - rm) / (2.0 * fd_step);
    }

    const Eigen::MatrixXd hessian = jac.transpose() * jac;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hessian);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("gauss_newton_covariance: eigen solve failed");
    const Eigen::VectorXd& ev = eig.eigenvalues();
    if (ev[0] <= 0.0) {
        // name the offending direction by its dominant component
        const Eigen::VectorXd dir = eig.eigenvectors().col(0);
        Eigen::Index worst = 0;
        dir.cwiseAbs().maxCoeff(&worst);
        throw std::runtime_error(
            "hessian is not positive definite: flat or saddle direction "
            "dominated by parameter index " +
            std::to_string(worst) + " (eigenvalue " + std::to_string(ev[0]) +
            ")");
    }
    return eig.eigenvectors() * ev.cwiseInverse().asDiagonal() *
           eig.eigenvectors().transpose();
}

ParameterUncertainty residual_uncertainty(
    const calibrate::ForwardModel& model,
    const std::vector<double>& optimum_params,
    const std::vector<double>& heads_obs, const calibrate::NLLConfig& cfg,
    const std::vector<std::string>& names, const std::vector<bool>& log10_scale,
    double fd_step) {
    const std::size_t k = optimum_params.size();
    if (log10_scale.size() != k || names.size() != k)
        throw std::invalid_argument("residual_uncertainty: size mismatch");
    if (!(cfg.sigma_h > 0.0) || !(cfg.sigma_hpas > 0.0))
        throw std::invalid_argument(
            "residual_uncertainty: sigma values must be positive");

    Eigen::VectorXd x0(k);
    for (std::size_t i = 0; i < k; ++i)
        x0[i] = log10_scale[i] ? std::log10(optimum_params[i])
                               : optimum_params[i];

    const ResidualFn residuals = [&](const Eigen::VectorXd& x) {
        std::vector<double> params(k);
        for (std::size_t i = 0; i < k; ++i)
            params[i] = log10_scale[i] ? std::pow(10.0, x[i]) : x[i];
        const calibrate::ModelOutput out = model(params);
        if (!out.ok)
            throw std::runtime_error(
                "residual_uncertainty: model failed near the optimum");
        if (out.well_heads.size() != heads_obs.size())
            throw std::runtime_error(
                "residual_uncertainty: wrong well head count");
        Eigen::VectorXd e(heads_obs.size() + 1);
        for (std::size_t i = 0; i < heads_obs.size(); ++i)
            e[static_cast<Eigen::Index>(i)] =
                (out.well_heads[i] - heads_obs[i]) / cfg.sigma_h;
        e[static_cast<Eigen::Index>(heads_obs.size())] =
            (out.h_pas - cfg.h_pas_ref) / cfg.sigma_hpas;
        return e;
    };

    const Eigen::MatrixXd cov = gauss_newton_covariance(residuals, x0, fd_step);

    ParameterUncertainty out;
    out.names = names;
    for (std::size_t i = 0; i < k; ++i) {
        const double st = std::sqrt(cov(static_cast<Eigen::Index>(i),
                                        static_cast<Eigen::Index>(i)));
        out.std_transformed.push_back(st);
        const double sp = log10_scale[i]
                              ? std::log(10.0) * optimum_params[i] * st
                              : st;
        out.std_physical.push_back(sp);
        out.range_2sigma.emplace_back(optimum_params[i] - 2.0 * sp,
                                      optimum_params[i] + 2.0 * sp);
    }
    return out;
}

}  // namespace gwcal::uq
