#include "varinfer/model.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "varinfer/rng.hpp"

namespace varinfer {

namespace {

double inf_norm(const Matrix& a) {
    return a.cwiseAbs().rowwise().sum().maxCoeff();
}

double operator_norm(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

}  // namespace

double spectral_radius(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw NonSquare("spectral_radius: matrix is " + std::to_string(a.rows()) +
                        "x" + std::to_string(a.cols()));
    }
    if (a.rows() == 0) return 0.0;
    if (!a.allFinite()) throw NumericalFailure("spectral_radius: non-finite entries");
    Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw NumericalFailure("spectral_radius: eigensolver failed");
    }
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

DecayIndex spectral_decay_index(const Matrix& a, double threshold, int cap,
                                DecayNorm norm) {
    if (threshold <= 0.0 || threshold >= 1.0) {
        throw Error("spectral_decay_index: threshold must lie in (0,1)");
    }
    const double rho = spectral_radius(a);
    if (rho >= 1.0) {
        throw Unstable("spectral_decay_index: spectral radius " + std::to_string(rho) +
                       " >= 1");
    }
    const int p = static_cast<int>(a.rows());
    if (cap < 0) cap = 10 * std::max(p, 1);

    const auto measure = [&](const Matrix& m) {
        return norm == DecayNorm::inf ? inf_norm(m) : operator_norm(m);
    };

    DecayIndex out;
    out.gamma = 1.0;  // t = 0 term, ||I||_2
    Matrix power = a;
    std::vector<double> trace;
    for (int t = 1; t <= cap; ++t) {
        const double nrm = measure(power);
        trace.push_back(nrm);
        if (nrm < threshold) {
            out.tau = t;
            return out;
        }
        out.gamma = std::max(out.gamma, operator_norm(power));
        power = power * a;
    }
    std::string msg = "spectral_decay_index: cap " + std::to_string(cap) +
                      " exceeded; ||A^t|| trace:";
    for (double v : trace) msg += " " + std::to_string(v);
    throw CapExceeded(msg);
}

TransitionMatrix TransitionMatrix::stable(const Matrix& a, double decay_threshold) {
    TransitionMatrix t;
    t.entries = a;
    t.spectral_radius = varinfer::spectral_radius(a);
    if (t.spectral_radius >= 1.0) {
        throw Unstable("TransitionMatrix: spectral radius " +
                       std::to_string(t.spectral_radius) + " >= 1");
    }
    t.decay_threshold = decay_threshold;
    const DecayIndex d = spectral_decay_index(a, decay_threshold);
    t.decay_index = d.tau;
    t.decay_gamma = d.gamma;
    return t;
}

Matrix companion_form(const std::vector<Matrix>& lags) {
    if (lags.empty()) throw DimensionMismatch("companion_form: no lag matrices");
    const Eigen::Index p = lags.front().rows();
    for (const Matrix& m : lags) {
        if (m.rows() != p || m.cols() != p) {
            throw DimensionMismatch("companion_form: all blocks must be p x p");
        }
    }
    const Eigen::Index d = static_cast<Eigen::Index>(lags.size());
    if (d == 1) return lags.front();
    Matrix c = Matrix::Zero(d * p, d * p);
    for (Eigen::Index i = 0; i < d; ++i) {
        c.block(0, i * p, p, p) = lags[static_cast<std::size_t>(i)];
    }
    for (Eigen::Index i = 1; i < d; ++i) {
        c.block(i * p, (i - 1) * p, p, p).setIdentity();
    }
    return c;
}

void InnovationSpec::validate() const {
    if (scale < 0.0 || !std::isfinite(scale)) {
        throw ConfigError("innovation scale must be finite and >= 0");
    }
    if (family == Family::student_t && df <= 2.0) {
        throw ConfigError("student_t innovations require df > 2 (finite variance)");
    }
}

int default_burn_in(const TransitionMatrix& a, int n) {
    const int cap = 10 * std::max(a.decay_index, 1) *
                    static_cast<int>(std::ceil(std::log(std::max(n, 2))));
    int b = 1;
    Matrix power = a.entries;
    while (b < cap && power.cwiseAbs().rowwise().sum().maxCoeff() >= 1e-8) {
        power = power * a.entries;
        ++b;
    }
    return std::max(b, 200);
}

namespace {

class InnovationSampler {
public:
    InnovationSampler(const InnovationSpec& spec, std::mt19937_64& gen)
        : spec_(spec), gen_(gen), normal_(gen) {
        if (spec_.family == InnovationSpec::Family::student_t && spec_.standardize) {
            t_scale_ = 1.0 / std::sqrt(spec_.df / (spec_.df - 2.0));
        }
    }

    double operator()() {
        switch (spec_.family) {
            case InnovationSpec::Family::gaussian:
                return spec_.scale * normal_();
            case InnovationSpec::Family::student_t: {
                std::student_t_distribution<double> t(spec_.df);
                return spec_.scale * t_scale_ * t(gen_);
            }
            case InnovationSpec::Family::laplace: {
                // difference of two unit exponentials has a standard Laplace
                // law with variance 2; keep scale as the per-exponential rate
                std::exponential_distribution<double> e(1.0);
                return spec_.scale * (e(gen_) - e(gen_));
            }
        }
        return 0.0;
    }

private:
    const InnovationSpec& spec_;
    std::mt19937_64& gen_;
    NormalSampler normal_;
    double t_scale_ = 1.0;
};

}  // namespace

VarSample simulate(const TransitionMatrix& a, const InnovationSpec& innovation,
                   int n, int burn_in, std::int64_t seed) {
    innovation.validate();
    if (n < 1) throw ConfigError("simulate: n must be >= 1");
    if (burn_in < 0) throw ConfigError("simulate: burn_in must be >= 0");
    const int p = a.dim();
    constexpr double kGuard = 1e12;

    std::mt19937_64 gen = make_stream(static_cast<std::uint64_t>(seed), 0);
    InnovationSampler draw(innovation, gen);

    Vector state = Vector::Zero(p);
    Vector eps(p);
    VarSample out;
    out.series.resize(n + 1, p);
    out.n = n;
    out.p = p;
    out.innovation = innovation;
    out.seed = seed;

    const int total = burn_in + n + 1;
    for (int step = 0; step < total; ++step) {
        for (int j = 0; j < p; ++j) eps(j) = draw();
        state = a.entries * state + eps;
        if (state.cwiseAbs().maxCoeff() > kGuard) {
            throw Overflow("simulate: state magnitude exceeded 1e12 at step " +
                           std::to_string(step));
        }
        if (step >= burn_in) out.series.row(step - burn_in) = state.transpose();
    }
    return out;
}

VarSample simulate(const TransitionMatrix& a, const InnovationSpec& innovation,
                   int n, std::int64_t seed) {
    return simulate(a, innovation, n, default_burn_in(a, n), seed);
}

Matrix stationary_autocov(const Matrix& a, const Matrix& sigma_eps) {
    const Eigen::Index p = a.rows();
    if (a.cols() != p || sigma_eps.rows() != p || sigma_eps.cols() != p) {
        throw DimensionMismatch("stationary_autocov: dimension mismatch");
    }
    if (spectral_radius(a) >= 1.0) {
        throw Unstable("stationary_autocov: unstable transition matrix");
    }
    // vec(Gamma) = (I - A (x) A)^{-1} vec(Sigma_eps)
    Matrix kron = Matrix::Zero(p * p, p * p);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            kron.block(i * p, j * p, p, p) = a(i, j) * a;
        }
    }
    Matrix lhs = Matrix::Identity(p * p, p * p) - kron;
    Eigen::Map<const Vector> rhs(sigma_eps.data(), p * p);
    Vector sol = lhs.partialPivLu().solve(rhs);
    Matrix gamma = Eigen::Map<const Matrix>(sol.data(), p, p);
    return 0.5 * (gamma + gamma.transpose());
}

}  // namespace varinfer
