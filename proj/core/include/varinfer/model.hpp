#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "varinfer/errors.hpp"

namespace varinfer {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// max_i |lambda_i(A)| via a dense eigensolver.
double spectral_radius(const Matrix& a);

struct DecayIndex {
    int tau = 0;      ///< smallest t >= 1 with ||A^t||_inf < threshold
    double gamma = 1; ///< max_{0 <= t < tau} ||A^t||_2 (includes t = 0, so >= 1)
};

/// Which matrix norm defines the decay index. The infinity norm is the
/// default; the spectral-norm variant appears in related work.
enum class DecayNorm { inf, spectral };

DecayIndex spectral_decay_index(const Matrix& a, double threshold,
                                int cap = -1, DecayNorm norm = DecayNorm::inf);

/// Stable VAR(1) coefficient matrix with its spectral diagnostics attached.
struct TransitionMatrix {
    Matrix entries;
    double spectral_radius = 0.0;
    int decay_index = 0;
    double decay_gamma = 1.0;
    double decay_threshold = 0.5;

    /// Validates stability and fills in the diagnostics. Throws Unstable.
    static TransitionMatrix stable(const Matrix& a, double decay_threshold = 0.5);

    int dim() const { return static_cast<int>(entries.rows()); }
};

/// Stacks VAR(d) lag matrices into the dp x dp companion matrix. d = 1
/// returns the single block unchanged.
Matrix companion_form(const std::vector<Matrix>& lags);

struct InnovationSpec {
    enum class Family { gaussian, student_t, laplace };
    Family family = Family::gaussian;
    double df = 0.0;      ///< degrees of freedom, student_t only; must be > 2
    double scale = 1.0;   ///< per-coordinate scale
    bool standardize = false;  ///< rescale student_t draws to unit variance

    void validate() const;
};

struct VarSample {
    Matrix series;  ///< (n+1) x p, rows X_0, ..., X_n
    int n = 0;
    int p = 0;
    InnovationSpec innovation;
    std::int64_t seed = 0;

    /// Rows X_0 .. X_{n-1} (the regressors).
    auto regressors() const { return series.topRows(n); }
    /// Rows X_1 .. X_n (the responses).
    auto responses() const { return series.bottomRows(n); }
};

/// Default burn-in: smallest b with ||A^b||_inf < 1e-8, floored at 200 and
/// capped at 10 * tau * ceil(log n).
int default_burn_in(const TransitionMatrix& a, int n);

/// Simulates X_i = A X_{i-1} + eps_i from X = 0, discarding burn_in steps.
/// Deterministic given the seed. Throws Overflow past the magnitude guard.
VarSample simulate(const TransitionMatrix& a, const InnovationSpec& innovation,
                   int n, int burn_in, std::int64_t seed);

/// simulate() with the default burn-in.
VarSample simulate(const TransitionMatrix& a, const InnovationSpec& innovation,
                   int n, std::int64_t seed);

/// Gamma(0) solving Gamma = A Gamma A^T + Sigma_eps (vectorized Lyapunov
/// solve; test oracle for unweighted second moments).
Matrix stationary_autocov(const Matrix& a, const Matrix& sigma_eps);

}  // namespace varinfer
