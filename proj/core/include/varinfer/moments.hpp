#pragma once

#include "varinfer/loss.hpp"

namespace varinfer {

/// (1/n) sum_i X_{i-1} X_{i-1}^T w(X_{i-1})
Matrix weighted_covariance(const VarSample& sample, const WeightConfig& cfg);

/// Same with w^2 in place of w.
Matrix weighted_covariance_sq(const VarSample& sample, const WeightConfig& cfg);

struct WeightedMoments {
    Matrix sigma_x_hat;  ///< w-weighted second moment
    Matrix s_x_hat;      ///< w^2-weighted second moment
    int n_used = 0;
    double threshold = 0.0;
};

WeightedMoments weighted_moments(const VarSample& sample, const WeightConfig& cfg);

struct MuEstimate {
    Vector mu_hat;
    double floor = 1e-3;
    std::vector<int> flagged;  ///< indices with mu_hat below the floor

    /// Throws DegenerateMu when any flagged entry would be consumed
    /// downstream, unless the caller explicitly overrides.
    void require_valid(bool override_floor = false) const;
};

/// mu_hat_k = (1/n) sum_i psi'(eps_hat_ik). Entries below the floor are
/// flagged, never clamped.
MuEstimate mu_hat(const Matrix& residuals, const RobustLossSpec& spec,
                  double floor = 1e-3);

/// Entries (1/n) sum_i psi(eps_hat_ij) psi(eps_hat_ik); symmetric PSD.
Matrix psi_cross_moment(const Matrix& residuals, const RobustLossSpec& spec);

}  // namespace varinfer
