#pragma once

#include "varinfer/clime.hpp"
#include "varinfer/moments.hpp"
#include "varinfer/pilot.hpp"

namespace varinfer {

/// Row k of the result = (1/mu_k) omega_x v_k, i.e. the p^2 x p^2
/// block-diagonal precision applied to vec(v) without materializing it.
Matrix apply_block_omega(const Matrix& omega_x, const Vector& mu, const Matrix& v);

struct DebiasedEstimate {
    Matrix beta_check;
    Matrix beta_hat;
    Vector mu_hat;
    Matrix omega_x;
    Matrix score_at_pilot;
    double threshold = 0.0;        ///< T
    double correction_max = 0.0;   ///< ||beta_check - beta_hat||_max
};

/// beta_check_k = beta_hat_k + (1/mu_k) omega_x S_k(beta_hat).
DebiasedEstimate debias(const PilotFit& pilot, const VarSample& sample,
                        const PrecisionEstimate& precision, const RobustLossSpec& spec,
                        const WeightConfig& cfg, bool override_mu_floor = false,
                        bool override_convergence = false, double mu_floor = 1e-3);

/// sqrt(n) * max |beta_check - beta0|.
double test_statistic(const DebiasedEstimate& estimate, const Matrix& beta0, int n);

/// Diagnostic: max_k ||I - (1/mu_k) omega_x H_k(beta_hat)||_max.
double block_remainder_diagnostic(const DebiasedEstimate& estimate,
                                  const VarSample& sample, const RobustLossSpec& spec,
                                  const WeightConfig& cfg);

}  // namespace varinfer
