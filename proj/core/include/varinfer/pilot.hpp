#pragma once

#include "varinfer/loss.hpp"

namespace varinfer {

struct SolverOptions {
    int max_iter = 5000;
    double tol = 1e-8;  ///< relative objective change
};

struct RowFit {
    Vector beta;
    int iterations = 0;
    bool converged = false;
    double kkt_residual = 0.0;  ///< subgradient optimality gap, max-norm
    std::vector<double> objective_trace;
};

/// l1-penalized robust row fit by accelerated proximal gradient with
/// function-value restart. k is zero-based.
RowFit fit_row(int k, const VarSample& sample, double lambda,
               const RobustLossSpec& spec, const WeightConfig& cfg,
               const SolverOptions& opts = {});

struct PilotFit {
    Matrix beta_hat;  ///< row k = beta_hat_k
    double lambda = 0.0;
    Matrix residuals;  ///< n x p, eps_hat_ik
    std::vector<int> iterations_per_row;
    std::vector<std::vector<double>> objective_trace;
    std::vector<bool> converged;
    std::vector<double> kkt_residual;

    bool all_converged() const;
};

PilotFit fit_all(const VarSample& sample, double lambda, const RobustLossSpec& spec,
                 const WeightConfig& cfg, const SolverOptions& opts = {});

/// c * T * sqrt(log p / n)
double default_pilot_lambda(int n, int p, const WeightConfig& cfg, double c = 0.5);

}  // namespace varinfer
