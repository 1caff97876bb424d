#pragma once

#include "varinfer/loss.hpp"

namespace varinfer {

struct ClimeColumn {
    Vector theta;
    bool converged = true;
    double feasibility = 0.0;  ///< |sigma_hat * theta - e_j|_inf
};

/// min |theta|_1 subject to |sigma_hat * theta - e_j|_inf <= lambda_n,
/// solved exactly on the split formulation theta = u - v. j is zero-based.
ClimeColumn clime_column(const Matrix& sigma_hat, int j, double lambda_n,
                         double tol = 1e-9);

struct PrecisionEstimate {
    Matrix omega;  ///< symmetrized estimate
    double lambda_n = 0.0;
    double feasibility_gap = 0.0;  ///< max_j |Sigma theta_j - e_j|_inf - lambda_n
    Vector column_l1_norms;        ///< of the pre-symmetrization solution
    bool all_converged = true;
};

/// CLIME: per-column l1 minimization then symmetrization keeping the
/// smaller-magnitude entry of each (i,j)/(j,i) pair.
PrecisionEstimate clime(const Matrix& sigma_hat, double lambda_n, double tol = 1e-9);

/// Theory-shaped default: c * omega_l1_proxy * gamma * tau^2 * T^2 *
/// (log p)^{3/2} / sqrt(n).
double default_lambda_n(int n, int p, int tau, double gamma, const WeightConfig& cfg,
                        double c = 0.5, double omega_l1_proxy = 1.0);

/// Data-driven fallback when the theory constants are unknown:
/// c * sqrt(log p / n).
double fallback_lambda_n(int n, int p, double c = 0.5);

}  // namespace varinfer
