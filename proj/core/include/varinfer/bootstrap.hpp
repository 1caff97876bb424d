#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "varinfer/debias.hpp"

namespace varinfer {

/// Kronecker factors of the bootstrap covariance D-hat = M (x) K, plus
/// symmetric PSD square roots after eigenvalue clipping.
struct BootstrapCovariance {
    Matrix m_factor;  ///< M_jk = psi_cross_jk / (mu_j mu_k)
    Matrix k_factor;  ///< K = omega_x S_x omega_x^T
    Matrix m_root;
    Matrix k_root;
    double psd_clip_magnitude = 0.0;  ///< most negative eigenvalue clipped
};

BootstrapCovariance build_dhat_factors(const PrecisionEstimate& precision,
                                       const WeightedMoments& moments,
                                       const MuEstimate& mu, const Matrix& psi_cross,
                                       double excessive_clip_tol = 1e-6);

/// One multiplier-bootstrap draw W = |Dhat^{1/2} eta|_inf via
/// V = k_root G m_root^T with G i.i.d. standard normal; O(p^3).
double sample_w(const BootstrapCovariance& cov, std::mt19937_64& gen);

/// ceil(B(1-alpha))-th order statistic of the draws.
double critical_value(const std::vector<double>& w_draws, double alpha);

struct TestReport {
    double statistic = 0.0;
    double critical = 0.0;
    double alpha = 0.0;
    bool reject_global = false;
    std::vector<std::pair<int, int>> rejected_entries;
    double p_value = 1.0;
    std::vector<double> w_draws;
    std::int64_t seed = 0;
};

/// Global max-norm test with per-entry decisions at the single bootstrap
/// critical value. Draw b uses sub-stream b of the seed.
TestReport simultaneous_test(const DebiasedEstimate& estimate, const Matrix& beta0,
                             const BootstrapCovariance& cov, int n, int B,
                             double alpha, std::int64_t seed);

struct IntervalMatrix {
    Matrix lower;
    Matrix upper;
    double half_width = 0.0;
};

/// Simultaneous intervals beta_check_jk +- c(alpha)/sqrt(n).
IntervalMatrix simultaneous_ci(const DebiasedEstimate& estimate,
                               const BootstrapCovariance& cov, int n, int B,
                               double alpha, std::int64_t seed);

}  // namespace varinfer
