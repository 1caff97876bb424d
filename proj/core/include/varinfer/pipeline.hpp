#pragma once

#include <optional>

#include "varinfer/bootstrap.hpp"

namespace varinfer {

/// Knobs for the full inference pipeline. Optional fields fall back to the
/// documented defaults computed from the data.
struct PipelineOptions {
    RobustLossSpec loss;
    std::optional<double> threshold_T;      ///< absolute T; default 0.95 quantile
    double threshold_quantile = 0.95;
    std::optional<double> pilot_lambda;     ///< default c_pilot * T * sqrt(log p / n)
    double pilot_c = 0.5;
    std::optional<double> clime_lambda;     ///< default data-driven fallback
    double clime_c = 0.5;
    double mu_floor = 1e-3;
    SolverOptions solver;
    int bootstrap_draws = 1000;
    double alpha = 0.05;
    bool override_mu_floor = false;
    bool override_convergence = false;
};

/// Everything produced up to and including the de-biased estimate.
struct FitResult {
    WeightConfig weight;
    double pilot_lambda = 0.0;
    double clime_lambda = 0.0;
    PilotFit pilot;
    WeightedMoments moments;
    MuEstimate mu;
    Matrix psi_cross;
    PrecisionEstimate precision;
    DebiasedEstimate debiased;
    BootstrapCovariance cov;
};

FitResult run_fit(const VarSample& sample, const PipelineOptions& opts);

struct PipelineResult {
    FitResult fit;
    TestReport report;
};

/// Full pipeline: pilot -> moments -> CLIME -> de-bias -> bootstrap test
/// of H0: A = beta0.
PipelineResult run_test(const VarSample& sample, const Matrix& beta0,
                        const PipelineOptions& opts, std::int64_t bootstrap_seed);

}  // namespace varinfer
