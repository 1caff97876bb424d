#include "varinfer/loss.hpp"

#include <algorithm>
#include <cmath>

namespace varinfer {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488016887242097;

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }
}  // namespace

double RobustLossSpec::psi_bound() const {
    return kind == LossKind::smoothed_huber_1 ? 0.5 : 2.0 * kSqrt2 / 3.0;
}

double RobustLossSpec::knot() const {
    return kind == LossKind::smoothed_huber_1 ? 1.0 : kSqrt2;
}

double loss_value(const RobustLossSpec& spec, double x) {
    const double ax = std::abs(x);
    if (spec.kind == LossKind::smoothed_huber_1) {
        if (ax <= 1.0) return x * x / 2.0 - ax * ax * ax / 6.0;
        return ax / 2.0 - 1.0 / 6.0;
    }
    if (ax <= kSqrt2) return x * x / 2.0 - x * x * x * x / 24.0;
    return (2.0 * kSqrt2 / 3.0) * ax - 0.5;
}

double psi(const RobustLossSpec& spec, double x) {
    const double ax = std::abs(x);
    if (spec.kind == LossKind::smoothed_huber_1) {
        if (ax <= 1.0) return x - x * ax / 2.0;
        return sign(x) / 2.0;
    }
    if (ax <= kSqrt2) return x - x * x * x / 6.0;
    return sign(x) * 2.0 * kSqrt2 / 3.0;
}

double psi_prime(const RobustLossSpec& spec, double x) {
    const double ax = std::abs(x);
    if (spec.kind == LossKind::smoothed_huber_1) {
        return ax <= 1.0 ? 1.0 - ax : 0.0;
    }
    return ax <= kSqrt2 ? std::max(0.0, 1.0 - x * x / 2.0) : 0.0;
}

double psi_second(const RobustLossSpec& spec, double x) {
    const double ax = std::abs(x);
    if (spec.kind == LossKind::smoothed_huber_1) {
        return ax <= 1.0 ? -sign(x) : 0.0;
    }
    return ax <= kSqrt2 ? -x : 0.0;
}

double weight_from_maxabs(double maxabs, const WeightConfig& cfg) {
    if (maxabs <= cfg.threshold) return 1.0;
    const double r = cfg.threshold / maxabs;
    return r * r * r;
}

double weight(const Eigen::Ref<const Vector>& x, const WeightConfig& cfg) {
    const double m = x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
    return weight_from_maxabs(m, cfg);
}

Vector regressor_weights(const VarSample& sample, const WeightConfig& cfg) {
    Vector w(sample.n);
    for (int i = 0; i < sample.n; ++i) {
        w(i) = weight_from_maxabs(sample.series.row(i).cwiseAbs().maxCoeff(), cfg);
    }
    return w;
}

double default_threshold(const VarSample& sample, double q) {
    std::vector<double> maxabs(static_cast<std::size_t>(sample.n));
    for (int i = 0; i < sample.n; ++i) {
        maxabs[static_cast<std::size_t>(i)] = sample.series.row(i).cwiseAbs().maxCoeff();
    }
    std::sort(maxabs.begin(), maxabs.end());
    const int idx = std::max(1, static_cast<int>(std::ceil(q * sample.n)));
    return maxabs[static_cast<std::size_t>(std::min(idx, sample.n) - 1)];
}

Matrix residuals(const Matrix& beta, const VarSample& sample) {
    if (beta.rows() != sample.p || beta.cols() != sample.p) {
        throw DimensionMismatch("residuals: beta must be p x p");
    }
    // column k of regressors * beta^T is X_{i-1}^T beta_k
    return sample.responses() - sample.regressors() * beta.transpose();
}

double objective(const Matrix& beta, const VarSample& sample,
                 const RobustLossSpec& spec, const WeightConfig& cfg) {
    const Matrix res = residuals(beta, sample);
    const Vector w = regressor_weights(sample, cfg);
    double total = 0.0;
    for (int i = 0; i < sample.n; ++i) {
        double row = 0.0;
        for (int k = 0; k < sample.p; ++k) row += loss_value(spec, res(i, k));
        total += row * w(i);
    }
    return total / sample.n;
}

Matrix score(const Matrix& beta, const VarSample& sample,
             const RobustLossSpec& spec, const WeightConfig& cfg) {
    const Matrix res = residuals(beta, sample);
    const Vector w = regressor_weights(sample, cfg);
    Matrix psi_w(sample.n, sample.p);
    for (int i = 0; i < sample.n; ++i) {
        for (int k = 0; k < sample.p; ++k) psi_w(i, k) = psi(spec, res(i, k)) * w(i);
    }
    return (psi_w.transpose() * sample.regressors()) / sample.n;
}

Matrix hessian_block(const Matrix& beta, const VarSample& sample,
                     const RobustLossSpec& spec, const WeightConfig& cfg, int k) {
    if (k < 0 || k >= sample.p) {
        throw IndexOutOfRange("hessian_block: row index " + std::to_string(k));
    }
    const Matrix res = residuals(beta, sample);
    const Vector w = regressor_weights(sample, cfg);
    Vector d(sample.n);
    for (int i = 0; i < sample.n; ++i) d(i) = psi_prime(spec, res(i, k)) * w(i);
    const auto x = sample.regressors();
    Matrix h = (x.transpose() * d.asDiagonal() * x) / sample.n;
    return 0.5 * (h + h.transpose());
}

}  // namespace varinfer
