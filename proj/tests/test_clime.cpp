#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "varinfer/clime.hpp"
#include "varinfer/rng.hpp"

using namespace varinfer;

namespace {

Matrix random_spd(int p, std::uint64_t seed) {
    auto gen = make_stream(seed, 3);
    NormalSampler normal(gen);
    Matrix b(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) b(i, j) = normal();
    }
    Matrix sigma = b * b.transpose() / p + 0.5 * Matrix::Identity(p, p);
    return sigma / sigma.diagonal().maxCoeff();
}

// Exhaustive oracle: minimize c^T x over {x >= 0 : A x = b} by enumerating
// every basis (square column subset) of A. Independent of any pivoting rule.
double brute_force_lp(const Matrix& a, const Vector& b, const Vector& c) {
    const int m = static_cast<int>(a.rows());
    const int nv = static_cast<int>(a.cols());
    std::vector<int> idx(m);
    for (int i = 0; i < m; ++i) idx[i] = i;
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        Matrix basis(m, m);
        for (int i = 0; i < m; ++i) basis.col(i) = a.col(idx[i]);
        Eigen::FullPivLU<Matrix> lu(basis);
        if (lu.isInvertible()) {
            const Vector xb = lu.solve(b);
            if ((xb.array() >= -1e-9).all() &&
                (basis * xb - b).cwiseAbs().maxCoeff() < 1e-8) {
                double obj = 0.0;
                for (int i = 0; i < m; ++i) obj += c(idx[i]) * std::max(xb(i), 0.0);
                best = std::min(best, obj);
            }
        }
        // next combination in lexicographic order
        int i = m - 1;
        while (i >= 0 && idx[i] == nv - m + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
    }
    return best;
}

// Same split formulation the solver uses: variables (u, v, s+, s-).
double column_l1_oracle(const Matrix& sigma, int j, double lambda) {
    const int p = static_cast<int>(sigma.rows());
    Matrix a = Matrix::Zero(2 * p, 4 * p);
    a.block(0, 0, p, p) = sigma;
    a.block(0, p, p, p) = -sigma;
    a.block(0, 2 * p, p, p) = Matrix::Identity(p, p);
    a.block(p, 0, p, p) = -sigma;
    a.block(p, p, p, p) = sigma;
    a.block(p, 3 * p, p, p) = Matrix::Identity(p, p);
    Vector b(2 * p);
    for (int i = 0; i < p; ++i) {
        b(i) = (i == j ? 1.0 : 0.0) + lambda;
        b(p + i) = (i == j ? -1.0 : 0.0) + lambda;
    }
    Vector c = Vector::Zero(4 * p);
    c.head(2 * p).setOnes();
    return brute_force_lp(a, b, c);
}

}  // namespace

TEST_CASE("identity covariance shrinks the diagonal by lambda") {
    const Matrix sigma = Matrix::Identity(4, 4);
    const PrecisionEstimate est = clime(sigma, 0.1);
    CHECK((est.omega - 0.9 * Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(est.all_converged);
}

TEST_CASE("scaled identity covariance") {
    // min |theta|_1 with |2 theta - e_j|_inf <= 0.1 puts theta_j = 0.45
    const Matrix sigma = 2.0 * Matrix::Identity(3, 3);
    const ClimeColumn col = clime_column(sigma, 1, 0.1);
    Vector expect = Vector::Zero(3);
    expect(1) = 0.45;
    CHECK((col.theta - expect).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(col.feasibility <= 0.1 + 1e-9);
}

TEST_CASE("objective matches the exhaustive basis oracle on random SPD inputs") {
    // 3x3 and 4x4, a handful of (matrix, lambda) draws each
    for (int p : {3, 4}) {
        for (std::uint64_t seed = 0; seed < 6; ++seed) {
            const Matrix sigma = random_spd(p, 100 * p + seed);
            const double lambda = 0.05 + 0.03 * static_cast<double>(seed);
            for (int j = 0; j < p; ++j) {
                const ClimeColumn col = clime_column(sigma, j, lambda);
                const double oracle = column_l1_oracle(sigma, j, lambda);
                CHECK(col.theta.lpNorm<1>() == doctest::Approx(oracle).epsilon(1e-6));
                CHECK((sigma * col.theta -
                       Vector::Unit(p, j)).cwiseAbs().maxCoeff() <= lambda + 1e-8);
            }
        }
    }
}

TEST_CASE("small lambda recovers the matrix inverse") {
    const Matrix sigma = random_spd(4, 77);
    const Matrix inv = sigma.inverse();
    const PrecisionEstimate est = clime(sigma, 1e-7);
    CHECK((est.omega - inv).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("column l1 norms are nonincreasing in lambda") {
    const Matrix sigma = random_spd(4, 91);
    double prev = std::numeric_limits<double>::infinity();
    for (double lambda : {0.01, 0.05, 0.1, 0.2, 0.4}) {
        const PrecisionEstimate est = clime(sigma, lambda);
        const double total = est.column_l1_norms.sum();
        CHECK(total <= prev + 1e-9);
        prev = total;
    }
}

TEST_CASE("symmetrization keeps the smaller-magnitude entry") {
    const Matrix sigma = random_spd(4, 13);
    const double lambda = 0.08;
    const PrecisionEstimate est = clime(sigma, lambda);
    CHECK((est.omega - est.omega.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const double tij = clime_column(sigma, j, lambda).theta(i);
            const double tji = clime_column(sigma, i, lambda).theta(j);
            const double keep = std::abs(tij) <= std::abs(tji) ? tij : tji;
            CHECK(est.omega(i, j) == doctest::Approx(keep).epsilon(1e-12));
        }
    }
}

TEST_CASE("lambda at or above one zeroes the estimate") {
    // theta = 0 is feasible once lambda >= |e_j|_inf = 1
    const Matrix sigma = random_spd(3, 29);
    const PrecisionEstimate est = clime(sigma, 1.0);
    CHECK(est.omega.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("default and fallback lambda shapes") {
    WeightConfig cfg{1.5};
    const double v = default_lambda_n(100, 10, 3, 1.2, cfg, 0.5, 2.0);
    CHECK(v == doctest::Approx(0.5 * 2.0 * 1.2 * 9.0 * 2.25 *
                               std::pow(std::log(10.0), 1.5) / 10.0));
    CHECK(fallback_lambda_n(100, 10, 0.5) ==
          doctest::Approx(0.5 * std::sqrt(std::log(10.0) / 100.0)));
}
