#include "varinfer/pilot.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace varinfer {

namespace {

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

struct RowProblem {
    // y_i = X_{i,k}, x_i = X_{i-1}, fixed weights w_i
    Matrix x;
    Vector y;
    Vector w;
    const RobustLossSpec& spec;
    int n;

    double smooth(const Vector& beta) const {
        const Vector res = y - x * beta;
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += loss_value(spec, res(i)) * w(i);
        return s / n;
    }

    Vector grad(const Vector& beta) const {
        const Vector res = y - x * beta;
        Vector psi_w(n);
        for (int i = 0; i < n; ++i) psi_w(i) = psi(spec, res(i)) * w(i);
        return -(x.transpose() * psi_w) / n;
    }
};

}  // namespace

RowFit fit_row(int k, const VarSample& sample, double lambda,
               const RobustLossSpec& spec, const WeightConfig& cfg,
               const SolverOptions& opts) {
    if (k < 0 || k >= sample.p) throw IndexOutOfRange("fit_row: row " + std::to_string(k));
    if (lambda < 0.0) throw ConfigError("fit_row: lambda must be >= 0");

    RowProblem prob{sample.regressors(), sample.responses().col(k),
                    regressor_weights(sample, cfg), spec, sample.n};

    // global Lipschitz bound: psi' <= 1, so Hessian <= weighted Gram matrix
    Matrix gram = (prob.x.transpose() * prob.w.asDiagonal() * prob.x) / sample.n;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (gram + gram.transpose()));
    const double lip = std::max(es.eigenvalues().maxCoeff(), 1e-12);
    double step = 1.0 / lip;

    const auto penalized = [&](const Vector& b) {
        return prob.smooth(b) + lambda * b.lpNorm<1>();
    };
    const auto prox_step = [&](const Vector& point, double s) {
        const Vector g = prob.grad(point);
        Vector out = point - s * g;
        for (int j = 0; j < sample.p; ++j) out(j) = soft_threshold(out(j), s * lambda);
        return out;
    };
    // sufficient decrease for the smooth part at the candidate
    const auto step_ok = [&](const Vector& from, const Vector& to, double s) {
        const Vector d = to - from;
        return prob.smooth(to) <=
               prob.smooth(from) + prob.grad(from).dot(d) + d.squaredNorm() / (2.0 * s) + 1e-14;
    };

    RowFit fit;
    Vector x_cur = Vector::Zero(sample.p);
    Vector x_prev = x_cur;
    Vector momentum = x_cur;
    double theta = 1.0;
    double f_cur = penalized(x_cur);
    fit.objective_trace.push_back(f_cur);

    for (int it = 0; it < opts.max_iter; ++it) {
        Vector cand = prox_step(momentum, step);
        while (!step_ok(momentum, cand, step)) {
            step *= 0.5;
            cand = prox_step(momentum, step);
        }
        double f_cand = penalized(cand);
        if (f_cand > f_cur) {
            // function-value restart: drop momentum, plain proximal step
            theta = 1.0;
            cand = prox_step(x_cur, step);
            while (!step_ok(x_cur, cand, step)) {
                step *= 0.5;
                cand = prox_step(x_cur, step);
            }
            f_cand = penalized(cand);
            if (f_cand > f_cur) {  // stationary up to arithmetic noise
                fit.converged = true;
                fit.iterations = it;
                break;
            }
        }
        const double theta_next = (1.0 + std::sqrt(1.0 + 4.0 * theta * theta)) / 2.0;
        x_prev = x_cur;
        x_cur = cand;
        momentum = x_cur + ((theta - 1.0) / theta_next) * (x_cur - x_prev);
        theta = theta_next;

        fit.objective_trace.push_back(f_cand);
        const double rel = std::abs(f_cur - f_cand) / std::max(1.0, std::abs(f_cur));
        f_cur = f_cand;
        fit.iterations = it + 1;
        if (rel < opts.tol) {
            fit.converged = true;
            break;
        }
    }

    fit.beta = x_cur;
    const Vector g = prob.grad(x_cur);
    double kkt = 0.0;
    for (int j = 0; j < sample.p; ++j) {
        const double r = x_cur(j) != 0.0 ? std::abs(g(j) + lambda * (x_cur(j) > 0 ? 1.0 : -1.0))
                                         : std::max(0.0, std::abs(g(j)) - lambda);
        kkt = std::max(kkt, r);
    }
    fit.kkt_residual = kkt;
    return fit;
}

bool PilotFit::all_converged() const {
    return std::all_of(converged.begin(), converged.end(), [](bool b) { return b; });
}

PilotFit fit_all(const VarSample& sample, double lambda, const RobustLossSpec& spec,
                 const WeightConfig& cfg, const SolverOptions& opts) {
    PilotFit fit;
    fit.lambda = lambda;
    fit.beta_hat.resize(sample.p, sample.p);
    fit.iterations_per_row.resize(static_cast<std::size_t>(sample.p));
    fit.objective_trace.resize(static_cast<std::size_t>(sample.p));
    fit.converged.resize(static_cast<std::size_t>(sample.p));
    fit.kkt_residual.resize(static_cast<std::size_t>(sample.p));
    for (int k = 0; k < sample.p; ++k) {
        RowFit row = fit_row(k, sample, lambda, spec, cfg, opts);
        fit.beta_hat.row(k) = row.beta.transpose();
        fit.iterations_per_row[static_cast<std::size_t>(k)] = row.iterations;
        fit.objective_trace[static_cast<std::size_t>(k)] = std::move(row.objective_trace);
        fit.converged[static_cast<std::size_t>(k)] = row.converged;
        fit.kkt_residual[static_cast<std::size_t>(k)] = row.kkt_residual;
    }
    fit.residuals = residuals(fit.beta_hat, sample);
    return fit;
}

double default_pilot_lambda(int n, int p, const WeightConfig& cfg, double c) {
    return c * cfg.threshold * std::sqrt(std::log(static_cast<double>(p)) / n);
}

}  // namespace varinfer
