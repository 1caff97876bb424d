#include "varinfer/clime.hpp"

#include <cmath>

#include "varinfer/lp.hpp"

namespace varinfer {

ClimeColumn clime_column(const Matrix& sigma_hat, int j, double lambda_n, double tol) {
    const int p = static_cast<int>(sigma_hat.rows());
    if (sigma_hat.cols() != p) throw NonSquare("clime_column: sigma_hat not square");
    if (j < 0 || j >= p) throw IndexOutOfRange("clime_column: column " + std::to_string(j));
    if (lambda_n <= 0.0) throw ConfigError("clime_column: lambda_n must be > 0");

    // split formulation: theta = u - v, u,v >= 0, slacks s+, s- >= 0:
    //   Sigma(u - v) + s+ = e_j + lambda
    //  -Sigma(u - v) + s- = -e_j + lambda
    const int nvar = 4 * p;
    Matrix a = Matrix::Zero(2 * p, nvar);
    a.block(0, 0, p, p) = sigma_hat;
    a.block(0, p, p, p) = -sigma_hat;
    a.block(0, 2 * p, p, p).setIdentity();
    a.block(p, 0, p, p) = -sigma_hat;
    a.block(p, p, p, p) = sigma_hat;
    a.block(p, 3 * p, p, p).setIdentity();
    Vector b(2 * p);
    b.head(p) = Vector::Constant(p, lambda_n);
    b(j) += 1.0;
    b.tail(p) = Vector::Constant(p, lambda_n);
    b(p + j) -= 1.0;
    Vector c = Vector::Zero(nvar);
    c.head(2 * p).setOnes();

    const LpResult res = solve_lp(a, b, c);
    ClimeColumn col;
    col.theta = res.x.head(p) - res.x.segment(p, p);
    col.feasibility = (sigma_hat * col.theta - Vector::Unit(p, j)).cwiseAbs().maxCoeff();
    col.converged = res.status == LpStatus::optimal && col.feasibility <= lambda_n + tol;
    return col;
}

PrecisionEstimate clime(const Matrix& sigma_hat, double lambda_n, double tol) {
    const int p = static_cast<int>(sigma_hat.rows());
    Matrix theta(p, p);  // column j = solution for e_j
    PrecisionEstimate est;
    est.lambda_n = lambda_n;
    est.column_l1_norms.resize(p);
    est.feasibility_gap = -lambda_n;
    for (int j = 0; j < p; ++j) {
        ClimeColumn col = clime_column(sigma_hat, j, lambda_n, tol);
        theta.col(j) = col.theta;
        est.column_l1_norms(j) = col.theta.lpNorm<1>();
        est.feasibility_gap = std::max(est.feasibility_gap, col.feasibility - lambda_n);
        est.all_converged = est.all_converged && col.converged;
    }
    // keep the smaller-magnitude entry of each symmetric pair; ties keep
    // theta_ij
    est.omega.resize(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = i; j < p; ++j) {
            const double v = std::abs(theta(i, j)) <= std::abs(theta(j, i))
                                 ? theta(i, j)
                                 : theta(j, i);
            est.omega(i, j) = v;
            est.omega(j, i) = v;
        }
    }
    return est;
}

double default_lambda_n(int n, int p, int tau, double gamma, const WeightConfig& cfg,
                        double c, double omega_l1_proxy) {
    const double lp = std::log(static_cast<double>(p));
    return c * omega_l1_proxy * gamma * tau * tau * cfg.threshold * cfg.threshold *
           std::pow(lp, 1.5) / std::sqrt(static_cast<double>(n));
}

double fallback_lambda_n(int n, int p, double c) {
    return c * std::sqrt(std::log(static_cast<double>(p)) / n);
}

}  // namespace varinfer
