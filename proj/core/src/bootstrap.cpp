#include "varinfer/bootstrap.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "varinfer/rng.hpp"

namespace varinfer {

namespace {

struct ClippedRoot {
    Matrix root;
    double clip = 0.0;
};

ClippedRoot psd_root(const Matrix& sym) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    if (es.info() != Eigen::Success) {
        throw NumericalFailure("psd_root: eigendecomposition failed");
    }
    Vector lam = es.eigenvalues();
    ClippedRoot out;
    out.clip = std::max(0.0, -lam.minCoeff());
    lam = lam.cwiseMax(0.0);
    out.root = es.eigenvectors() * lam.cwiseSqrt().asDiagonal() *
               es.eigenvectors().transpose();
    return out;
}

}  // namespace

BootstrapCovariance build_dhat_factors(const PrecisionEstimate& precision,
                                       const WeightedMoments& moments,
                                       const MuEstimate& mu, const Matrix& psi_cross,
                                       double excessive_clip_tol) {
    mu.require_valid();
    const Eigen::Index p = precision.omega.rows();
    if (psi_cross.rows() != p || moments.s_x_hat.rows() != p || mu.mu_hat.size() != p) {
        throw DimensionMismatch("build_dhat_factors: dimension mismatch");
    }

    BootstrapCovariance cov;
    cov.m_factor = psi_cross.array() /
                   (mu.mu_hat * mu.mu_hat.transpose()).array();
    Matrix k = precision.omega * moments.s_x_hat * precision.omega.transpose();
    cov.k_factor = 0.5 * (k + k.transpose());

    const ClippedRoot mr = psd_root(cov.m_factor);
    const ClippedRoot kr = psd_root(cov.k_factor);
    cov.m_root = mr.root;
    cov.k_root = kr.root;
    cov.psd_clip_magnitude = std::max(mr.clip, kr.clip);

    const double m_tr = std::abs(cov.m_factor.trace());
    const double k_tr = std::abs(cov.k_factor.trace());
    if (mr.clip > excessive_clip_tol * std::max(m_tr, 1e-300) ||
        kr.clip > excessive_clip_tol * std::max(k_tr, 1e-300)) {
        throw ExcessiveClip("build_dhat_factors: PSD clip magnitude " +
                            std::to_string(cov.psd_clip_magnitude) +
                            " exceeds tolerance; the precision estimate is likely "
                            "badly infeasible");
    }
    return cov;
}

double sample_w(const BootstrapCovariance& cov, std::mt19937_64& gen) {
    const Eigen::Index p = cov.m_root.rows();
    NormalSampler normal(gen);
    Matrix g(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) g(i, j) = normal();
    }
    const Matrix v = cov.k_root * g * cov.m_root.transpose();
    return v.cwiseAbs().maxCoeff();
}

double critical_value(const std::vector<double>& w_draws, double alpha) {
    if (w_draws.empty()) throw EmptyDraws("critical_value: no bootstrap draws");
    if (alpha <= 0.0 || alpha >= 1.0) {
        throw ConfigError("critical_value: alpha must lie in (0,1)");
    }
    const int b = static_cast<int>(w_draws.size());
    int rank = static_cast<int>(std::ceil(b * (1.0 - alpha)));
    rank = std::clamp(rank, 1, b);
    std::vector<double> sorted = w_draws;
    std::nth_element(sorted.begin(), sorted.begin() + (rank - 1), sorted.end());
    return sorted[static_cast<std::size_t>(rank - 1)];
}

TestReport simultaneous_test(const DebiasedEstimate& estimate, const Matrix& beta0,
                             const BootstrapCovariance& cov, int n, int B,
                             double alpha, std::int64_t seed) {
    if (B < 1) throw ConfigError("simultaneous_test: B must be >= 1");
    TestReport report;
    report.alpha = alpha;
    report.seed = seed;
    report.w_draws.resize(static_cast<std::size_t>(B));
    for (int b = 0; b < B; ++b) {
        auto gen = make_stream(static_cast<std::uint64_t>(seed),
                               static_cast<std::uint64_t>(b));
        report.w_draws[static_cast<std::size_t>(b)] = sample_w(cov, gen);
    }
    report.statistic = test_statistic(estimate, beta0, n);
    report.critical = critical_value(report.w_draws, alpha);
    report.reject_global = report.statistic > report.critical;

    const double root_n = std::sqrt(static_cast<double>(n));
    const Eigen::Index p = beta0.rows();
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index k = 0; k < p; ++k) {
            if (root_n * std::abs(estimate.beta_check(j, k) - beta0(j, k)) >
                report.critical) {
                report.rejected_entries.emplace_back(static_cast<int>(j),
                                                     static_cast<int>(k));
            }
        }
    }
    int ge = 0;
    for (double w : report.w_draws) {
        if (w >= report.statistic) ++ge;
    }
    report.p_value = (1.0 + ge) / (B + 1.0);
    return report;
}

IntervalMatrix simultaneous_ci(const DebiasedEstimate& estimate,
                               const BootstrapCovariance& cov, int n, int B,
                               double alpha, std::int64_t seed) {
    std::vector<double> draws(static_cast<std::size_t>(B));
    for (int b = 0; b < B; ++b) {
        auto gen = make_stream(static_cast<std::uint64_t>(seed),
                               static_cast<std::uint64_t>(b));
        draws[static_cast<std::size_t>(b)] = sample_w(cov, gen);
    }
    IntervalMatrix ci;
    ci.half_width = critical_value(draws, alpha) / std::sqrt(static_cast<double>(n));
    ci.lower = estimate.beta_check.array() - ci.half_width;
    ci.upper = estimate.beta_check.array() + ci.half_width;
    return ci;
}

}  // namespace varinfer
