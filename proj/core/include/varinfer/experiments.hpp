#pragma once

#include <string>

#include "varinfer/pipeline.hpp"

namespace varinfer {

/// Banded design A_ij = lambda^{|i-j|} 1{|i-j| <= s}, rescaled to spectral
/// radius exactly 1/2.
TransitionMatrix banded_design(int p, int s, double lambda,
                               double decay_threshold = 0.5);

/// Block-diagonal design: ceil(p/s) upper-bidiagonal blocks with lambda_i on
/// the diagonal and lambda_i^2 on the superdiagonal, lambda_i ~ Unif(-0.8, 0.8).
TransitionMatrix block_diagonal_design(int p, int s, std::int64_t seed,
                                       double decay_threshold = 0.5);

struct DesignSpec {
    enum class Kind { banded, block_diagonal, explicit_matrix };
    Kind kind = Kind::banded;
    double lambda = 0.5;  ///< banded only
    int s = 2;
    Matrix matrix;  ///< explicit_matrix only

    TransitionMatrix build(int p, std::int64_t seed, double decay_threshold) const;
    std::string name() const;
};

struct ExperimentConfig {
    DesignSpec design;
    int n = 30;
    int p = 10;
    InnovationSpec innovation;
    int replications = 100;       ///< R
    int bootstrap_draws = 1000;   ///< B
    double alpha = 0.05;
    std::int64_t master_seed = 1;
    double decay_threshold = 0.5;
    PipelineOptions pipeline;
    /// power mode: perturb beta0 at (power_row, power_col) by power_delta
    double power_delta = 0.0;
    int power_row = 0;
    int power_col = 0;
    int workers = 1;

    void validate() const;
};

struct ReplicationRecord {
    int rep_index = 0;
    bool failed = false;
    std::string error;
    double statistic = 0.0;
    double c_alpha = 0.0;
    bool reject = false;
    double p_value = 1.0;
    std::vector<double> w_draws;
};

/// End-to-end run under H0 (beta0 = truth, optionally perturbed in power
/// mode); deterministic per (master_seed, rep_index).
ReplicationRecord run_replication(const ExperimentConfig& config, int rep_index);

struct ExperimentSummary {
    ExperimentConfig config;
    std::vector<ReplicationRecord> records;
    int failures = 0;
    double empirical_size = 0.0;   ///< rejection rate among successful reps
    double coverage = 0.0;         ///< fraction with statistic <= c(alpha)
    double mean_critical = 0.0;
};

ExperimentSummary run_experiment(const ExperimentConfig& config);

/// Paired empirical quantiles of the statistics against the pooled W draws
/// at q = (i - 0.5) / R.
std::vector<std::pair<double, double>> qq_data(const std::vector<double>& statistics,
                                               const std::vector<double>& w_pool);

/// Midpoint-convention empirical quantile with linear interpolation.
double empirical_quantile(std::vector<double> sorted_or_not, double q);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b);

struct SizeCoverageRow {
    std::string design;
    double df = 0.0;
    int n = 0;
    int p = 0;
    double alpha = 0.0;
    double size = 0.0;
    double coverage = 0.0;
    double mean_critical = 0.0;
    int failures = 0;
    int replications = 0;
};

SizeCoverageRow summarize(const ExperimentSummary& summary);

}  // namespace varinfer
