#include "varinfer/moments.hpp"

#include <string>

namespace varinfer {

namespace {

Matrix weighted_gram(const VarSample& sample, const Vector& w) {
    const auto x = sample.regressors();
    Matrix m = (x.transpose() * w.asDiagonal() * x) / sample.n;
    return 0.5 * (m + m.transpose());
}

}  // namespace

Matrix weighted_covariance(const VarSample& sample, const WeightConfig& cfg) {
    return weighted_gram(sample, regressor_weights(sample, cfg));
}

Matrix weighted_covariance_sq(const VarSample& sample, const WeightConfig& cfg) {
    Vector w = regressor_weights(sample, cfg);
    return weighted_gram(sample, w.cwiseProduct(w));
}

WeightedMoments weighted_moments(const VarSample& sample, const WeightConfig& cfg) {
    WeightedMoments m;
    const Vector w = regressor_weights(sample, cfg);
    m.sigma_x_hat = weighted_gram(sample, w);
    Vector w2 = w.cwiseProduct(w);
    m.s_x_hat = weighted_gram(sample, w2);
    m.n_used = sample.n;
    m.threshold = cfg.threshold;
    return m;
}

void MuEstimate::require_valid(bool override_floor) const {
    if (override_floor || flagged.empty()) return;
    std::string msg = "mu_hat entries below floor " + std::to_string(floor) +
                      " at indices:";
    for (int k : flagged) msg += " " + std::to_string(k);
    msg += "; consider enlarging the weight threshold T or switching loss kind";
    throw DegenerateMu(msg);
}

MuEstimate mu_hat(const Matrix& residuals, const RobustLossSpec& spec, double floor) {
    const Eigen::Index n = residuals.rows();
    const Eigen::Index p = residuals.cols();
    if (n == 0) throw EmptyInput("mu_hat: empty residual matrix");
    MuEstimate est;
    est.floor = floor;
    est.mu_hat.resize(p);
    for (Eigen::Index k = 0; k < p; ++k) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) s += psi_prime(spec, residuals(i, k));
        est.mu_hat(k) = s / static_cast<double>(n);
        if (est.mu_hat(k) < floor) est.flagged.push_back(static_cast<int>(k));
    }
    return est;
}

Matrix psi_cross_moment(const Matrix& residuals, const RobustLossSpec& spec) {
    const Eigen::Index n = residuals.rows();
    const Eigen::Index p = residuals.cols();
    Matrix psi_mat(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < p; ++k) psi_mat(i, k) = psi(spec, residuals(i, k));
    }
    Matrix m = (psi_mat.transpose() * psi_mat) / static_cast<double>(n);
    return 0.5 * (m + m.transpose());
}

}  // namespace varinfer
