#pragma once

#include "varinfer/model.hpp"

namespace varinfer {

enum class LossKind { smoothed_huber_1, smoothed_huber_2 };

/// Smoothed Huber family: quadratic-ish near zero, linear past the knot,
/// with bounded first three derivatives.
struct RobustLossSpec {
    LossKind kind = LossKind::smoothed_huber_1;

    /// sup |psi| (the value of psi at the knot).
    double psi_bound() const;
    /// sup |psi'| (1 for both kinds).
    double curvature_bound() const { return 1.0; }
    /// knot location: 1 for kind I, sqrt(2) for kind II.
    double knot() const;
};

double loss_value(const RobustLossSpec& spec, double x);
double psi(const RobustLossSpec& spec, double x);
double psi_prime(const RobustLossSpec& spec, double x);
/// psi'' from the inner branch at the knot (only used in diagnostics).
double psi_second(const RobustLossSpec& spec, double x);

/// Normalizing weight w(x) = min{1, T^3 / |x|_inf^3}.
struct WeightConfig {
    double threshold = 1.0;  ///< T > 0
};

double weight(const Eigen::Ref<const Vector>& x, const WeightConfig& cfg);
double weight_from_maxabs(double maxabs, const WeightConfig& cfg);

/// Per-observation weights w(X_{i-1}), i = 1..n.
Vector regressor_weights(const VarSample& sample, const WeightConfig& cfg);

/// Default threshold T: the q-quantile of {|X_{i-1}|_inf}.
double default_threshold(const VarSample& sample, double q = 0.95);

/// Weighted empirical objective of the robust loss: rows of beta are beta_k.
double objective(const Matrix& beta, const VarSample& sample,
                 const RobustLossSpec& spec, const WeightConfig& cfg);

/// Row k = (1/n) sum_i psi(X_ik - X_{i-1}^T beta_k) X_{i-1} w(X_{i-1}).
/// This is the negative calculus gradient of objective w.r.t. beta_k.
Matrix score(const Matrix& beta, const VarSample& sample,
             const RobustLossSpec& spec, const WeightConfig& cfg);

/// (1/n) sum_i psi'(X_ik - X_{i-1}^T beta_k) X_{i-1} X_{i-1}^T w(X_{i-1});
/// the k-th diagonal block of the Hessian. k is zero-based.
Matrix hessian_block(const Matrix& beta, const VarSample& sample,
                     const RobustLossSpec& spec, const WeightConfig& cfg, int k);

/// Residual matrix R with R(i,k) = X_{i+1,k} - X_i^T beta_k, i = 0..n-1.
Matrix residuals(const Matrix& beta, const VarSample& sample);

}  // namespace varinfer
