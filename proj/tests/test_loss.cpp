#include <doctest.h>

#include <cmath>
#include <random>

#include "varinfer/loss.hpp"
#include "varinfer/model.hpp"
#include "varinfer/rng.hpp"

using namespace varinfer;

namespace {

const double kSqrt2 = std::sqrt(2.0);

VarSample random_sample(int n, int p, std::uint64_t seed) {
    auto gen = make_stream(seed, 0);
    NormalSampler normal(gen);
    VarSample s;
    s.n = n;
    s.p = p;
    s.series.resize(n + 1, p);
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j < p; ++j) s.series(i, j) = 1.5 * normal();
    }
    return s;
}

Matrix random_beta(int p, std::uint64_t seed) {
    auto gen = make_stream(seed, 1);
    NormalSampler normal(gen);
    Matrix b(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) b(i, j) = 0.3 * normal();
    }
    return b;
}

// independent naive double-loop evaluation of the objective
double naive_objective(const Matrix& beta, const VarSample& s,
                       const RobustLossSpec& spec, const WeightConfig& cfg) {
    double total = 0.0;
    for (int i = 1; i <= s.n; ++i) {
        double m = 0.0;
        for (int j = 0; j < s.p; ++j) m = std::max(m, std::abs(s.series(i - 1, j)));
        const double w = std::min(1.0, std::pow(cfg.threshold / m, 3.0));
        for (int k = 0; k < s.p; ++k) {
            double res = s.series(i, k);
            for (int j = 0; j < s.p; ++j) res -= s.series(i - 1, j) * beta(k, j);
            total += loss_value(spec, res) * w;
        }
    }
    return total / s.n;
}

}  // namespace

TEST_CASE("smoothed huber I pointwise values") {
    RobustLossSpec spec{LossKind::smoothed_huber_1};
    CHECK(loss_value(spec, 0.0) == 0.0);
    CHECK(psi(spec, 0.0) == 0.0);
    CHECK(psi_prime(spec, 0.0) == 1.0);
    // both branches meet at the knot
    CHECK(loss_value(spec, 1.0) == doctest::Approx(1.0 / 3.0));
    CHECK(loss_value(spec, std::nextafter(1.0, 2.0)) == doctest::Approx(1.0 / 3.0));
    CHECK(psi(spec, 1.0) == doctest::Approx(0.5));
    CHECK(psi_prime(spec, 1.0) == doctest::Approx(0.0));
    CHECK(spec.psi_bound() == doctest::Approx(0.5));
}

TEST_CASE("smoothed huber II matches the printed outer slope") {
    RobustLossSpec spec{LossKind::smoothed_huber_2};
    CHECK(psi(spec, kSqrt2) == doctest::Approx(2.0 * kSqrt2 / 3.0));
    CHECK(psi(spec, 10.0) == doctest::Approx(2.0 * kSqrt2 / 3.0));
    CHECK(spec.psi_bound() == doctest::Approx(2.0 * kSqrt2 / 3.0));
    CHECK(loss_value(spec, kSqrt2) ==
          doctest::Approx((2.0 * kSqrt2 / 3.0) * kSqrt2 - 0.5));
}

TEST_CASE("loss symmetry, boundedness and branch continuity on a grid") {
    for (LossKind kind : {LossKind::smoothed_huber_1, LossKind::smoothed_huber_2}) {
        RobustLossSpec spec{kind};
        std::mt19937_64 gen(321);
        std::uniform_real_distribution<double> unif(-5.0, 5.0);
        std::vector<double> grid = {0.0, 0.5, 1.0, -1.0, kSqrt2, -kSqrt2, 2.0, 4.0};
        for (int i = 0; i < 500; ++i) grid.push_back(unif(gen));
        for (double x : grid) {
            CHECK(loss_value(spec, x) == doctest::Approx(loss_value(spec, -x)).epsilon(1e-12));
            CHECK(psi(spec, x) == doctest::Approx(-psi(spec, -x)).epsilon(1e-12));
            CHECK(std::abs(psi(spec, x)) <= spec.psi_bound() + 1e-12);
            CHECK(psi_prime(spec, x) >= 0.0);
            CHECK(psi_prime(spec, x) <= 1.0);
            CHECK(std::abs(psi(spec, x)) <= std::abs(x) + 1e-12);
        }
        // continuity at the knots to 1e-12
        const double knot = spec.knot();
        for (double sgn : {1.0, -1.0}) {
            const double in = sgn * std::nextafter(knot, 0.0);
            const double out = sgn * std::nextafter(knot, 10.0 * sgn);
            CHECK(std::abs(loss_value(spec, in) - loss_value(spec, out)) < 1e-12);
            CHECK(std::abs(psi(spec, in) - psi(spec, out)) < 1e-12);
            CHECK(std::abs(psi_prime(spec, in) - psi_prime(spec, out)) < 1e-10);
        }
    }
}

TEST_CASE("psi is nondecreasing (convexity)") {
    for (LossKind kind : {LossKind::smoothed_huber_1, LossKind::smoothed_huber_2}) {
        RobustLossSpec spec{kind};
        std::mt19937_64 gen(99);
        std::uniform_real_distribution<double> unif(-4.0, 4.0);
        std::vector<double> xs(200);
        for (double& x : xs) x = unif(gen);
        std::sort(xs.begin(), xs.end());
        for (std::size_t i = 1; i < xs.size(); ++i) {
            CHECK(psi(spec, xs[i]) >= psi(spec, xs[i - 1]) - 1e-12);
        }
    }
}

TEST_CASE("weight function") {
    WeightConfig cfg{2.0};
    Vector x(3);
    x << 1.0, -0.5, 0.2;  // |x|_inf = 1 = T/2
    CHECK(weight(x, cfg) == 1.0);
    x << 4.0, 0.0, 0.0;  // |x|_inf = 2T
    CHECK(weight(x, cfg) == doctest::Approx(1.0 / 8.0));
    CHECK(weight(Vector::Zero(3), cfg) == 1.0);
}

TEST_CASE("objective vanishes on noiseless data at the truth") {
    Matrix a(2, 2);
    a << 0.4, 0.1, 0.0, 0.3;
    VarSample s;
    s.n = 20;
    s.p = 2;
    s.series.resize(21, 2);
    s.series.row(0) << 1.0, -0.5;
    for (int i = 1; i <= 20; ++i) {
        s.series.row(i) = (a * s.series.row(i - 1).transpose()).transpose();
    }
    RobustLossSpec spec;
    WeightConfig cfg{1.0};
    CHECK(objective(a, s, spec, cfg) == 0.0);
    CHECK(score(a, s, spec, cfg).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("objective agrees with the naive double loop") {
    const VarSample s = random_sample(40, 4, 7);
    const Matrix beta = random_beta(4, 8);
    for (LossKind kind : {LossKind::smoothed_huber_1, LossKind::smoothed_huber_2}) {
        RobustLossSpec spec{kind};
        WeightConfig cfg{default_threshold(s)};
        CHECK(objective(beta, s, spec, cfg) ==
              doctest::Approx(naive_objective(beta, s, spec, cfg)).epsilon(1e-12));
    }
}

TEST_CASE("score is the negative finite-difference gradient of the objective") {
    const VarSample s = random_sample(30, 3, 17);
    const Matrix beta = random_beta(3, 18);
    RobustLossSpec spec{LossKind::smoothed_huber_2};
    WeightConfig cfg{default_threshold(s)};
    const Matrix sc = score(beta, s, spec, cfg);
    const double h = 1e-5;
    for (int k = 0; k < 3; ++k) {
        for (int j = 0; j < 3; ++j) {
            Matrix bp = beta, bm = beta;
            bp(k, j) += h;
            bm(k, j) -= h;
            const double fd = (objective(bp, s, spec, cfg) - objective(bm, s, spec, cfg)) / (2 * h);
            CHECK(sc(k, j) == doctest::Approx(-fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("single-observation score is hand-computable") {
    VarSample s;
    s.n = 1;
    s.p = 1;
    s.series.resize(2, 1);
    s.series << 0.7, 0.4;
    RobustLossSpec spec;
    WeightConfig cfg{0.5};
    const double beta_val = 0.2;
    Matrix beta(1, 1);
    beta << beta_val;
    const double res = 0.4 - 0.7 * beta_val;
    const double w = std::min(1.0, std::pow(0.5 / 0.7, 3.0));
    const Matrix sc = score(beta, s, spec, cfg);
    CHECK(sc(0, 0) == doctest::Approx(psi(spec, res) * 0.7 * w).epsilon(1e-14));
}

TEST_CASE("hessian block matches finite differences of the score") {
    const VarSample s = random_sample(25, 3, 31);
    const Matrix beta = random_beta(3, 32);
    RobustLossSpec spec{LossKind::smoothed_huber_1};
    WeightConfig cfg{default_threshold(s)};
    const double h = 1e-6;
    for (int k = 0; k < 3; ++k) {
        const Matrix hb = hessian_block(beta, s, spec, cfg, k);
        CHECK((hb - hb.transpose()).cwiseAbs().maxCoeff() < 1e-14);
        for (int j = 0; j < 3; ++j) {
            Matrix bp = beta, bm = beta;
            bp(k, j) += h;
            bm(k, j) -= h;
            const Vector fd =
                (-(score(bp, s, spec, cfg).row(k) - score(bm, s, spec, cfg).row(k)) / (2 * h))
                    .transpose();
            for (int l = 0; l < 3; ++l) {
                CHECK(hb(l, j) == doctest::Approx(fd(l)).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("hessian block vanishes when all residuals pass the knot") {
    VarSample s;
    s.n = 5;
    s.p = 1;
    s.series.resize(6, 1);
    s.series << 0.1, 5.0, -5.0, 5.0, -5.0, 5.0;  // residuals far beyond 1
    RobustLossSpec spec{LossKind::smoothed_huber_1};
    WeightConfig cfg{10.0};
    Matrix beta = Matrix::Zero(1, 1);
    CHECK(hessian_block(beta, s, spec, cfg, 0).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(hessian_block(beta, s, spec, cfg, 3), IndexOutOfRange);
}

TEST_CASE("default threshold is the 0.95 quantile of regressor max-norms") {
    VarSample s;
    s.n = 20;
    s.p = 1;
    s.series.resize(21, 1);
    for (int i = 0; i <= 20; ++i) s.series(i, 0) = i + 1.0;  // regressors 1..20
    CHECK(default_threshold(s) == doctest::Approx(19.0));  // ceil(0.95*20) = 19th
}
