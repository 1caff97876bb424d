#include "varinfer/debias.hpp"

#include <cmath>

namespace varinfer {

Matrix apply_block_omega(const Matrix& omega_x, const Vector& mu, const Matrix& v) {
    const Eigen::Index p = omega_x.rows();
    if (v.rows() != p || v.cols() != p || mu.size() != p) {
        throw DimensionMismatch("apply_block_omega: dimension mismatch");
    }
    if ((mu.array() <= 0.0).any()) {
        throw DegenerateMu("apply_block_omega: nonpositive mu entry");
    }
    // row k of output = omega_x v_k / mu_k
    Matrix out = v * omega_x.transpose();
    out.array().colwise() /= mu.array();
    return out;
}

DebiasedEstimate debias(const PilotFit& pilot, const VarSample& sample,
                        const PrecisionEstimate& precision, const RobustLossSpec& spec,
                        const WeightConfig& cfg, bool override_mu_floor,
                        bool override_convergence, double mu_floor) {
    if (!pilot.all_converged() && !override_convergence) {
        throw NotConverged("debias: pilot fit did not converge (pass override to proceed)");
    }
    const MuEstimate mu = mu_hat(pilot.residuals, spec, mu_floor);
    mu.require_valid(override_mu_floor);

    DebiasedEstimate est;
    est.beta_hat = pilot.beta_hat;
    est.mu_hat = mu.mu_hat;
    est.omega_x = precision.omega;
    est.threshold = cfg.threshold;
    est.score_at_pilot = score(pilot.beta_hat, sample, spec, cfg);
    est.beta_check =
        pilot.beta_hat + apply_block_omega(precision.omega, mu.mu_hat, est.score_at_pilot);
    if (!est.beta_check.allFinite()) {
        throw NumericalFailure("debias: non-finite corrected estimate");
    }
    est.correction_max = (est.beta_check - est.beta_hat).cwiseAbs().maxCoeff();
    return est;
}

double test_statistic(const DebiasedEstimate& estimate, const Matrix& beta0, int n) {
    if (beta0.rows() != estimate.beta_check.rows() ||
        beta0.cols() != estimate.beta_check.cols()) {
        throw DimensionMismatch("test_statistic: beta0 shape mismatch");
    }
    return std::sqrt(static_cast<double>(n)) *
           (estimate.beta_check - beta0).cwiseAbs().maxCoeff();
}

double block_remainder_diagnostic(const DebiasedEstimate& estimate,
                                  const VarSample& sample, const RobustLossSpec& spec,
                                  const WeightConfig& cfg) {
    const Eigen::Index p = estimate.omega_x.rows();
    const Matrix eye = Matrix::Identity(p, p);
    double worst = 0.0;
    for (int k = 0; k < p; ++k) {
        const Matrix h = hessian_block(estimate.beta_hat, sample, spec, cfg, k);
        const Matrix d = eye - (estimate.omega_x * h) / estimate.mu_hat(k);
        worst = std::max(worst, d.cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace varinfer
