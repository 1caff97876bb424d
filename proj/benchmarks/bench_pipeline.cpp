#include <benchmark/benchmark.h>

#include "varinfer/bootstrap.hpp"
#include "varinfer/clime.hpp"
#include "varinfer/experiments.hpp"
#include "varinfer/pilot.hpp"
#include "varinfer/rng.hpp"

using namespace varinfer;

namespace {

VarSample bench_sample(int n, int p) {
    const TransitionMatrix a = banded_design(p, 2, 0.5);
    InnovationSpec innovation;
    innovation.family = InnovationSpec::Family::student_t;
    innovation.df = 10;
    return simulate(a, innovation, n, 1);
}

void BM_PilotFit(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int p = static_cast<int>(state.range(1));
    const VarSample s = bench_sample(n, p);
    RobustLossSpec spec;
    WeightConfig cfg{default_threshold(s)};
    const double lambda = default_pilot_lambda(n, p, cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_all(s, lambda, spec, cfg));
    }
}
BENCHMARK(BM_PilotFit)->Args({30, 10})->Args({250, 10})->Args({100, 20});

void BM_ClimeColumn(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const VarSample s = bench_sample(200, p);
    WeightConfig cfg{default_threshold(s)};
    const Matrix sigma = weighted_covariance(s, cfg);
    const double lambda = fallback_lambda_n(200, p);
    for (auto _ : state) {
        benchmark::DoNotOptimize(clime_column(sigma, 0, lambda));
    }
}
BENCHMARK(BM_ClimeColumn)->Arg(10)->Arg(20)->Arg(40);

void BM_BootstrapDraw(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    PrecisionEstimate precision;
    precision.omega = Matrix::Identity(p, p);
    WeightedMoments moments;
    moments.sigma_x_hat = Matrix::Identity(p, p);
    moments.s_x_hat = Matrix::Identity(p, p);
    MuEstimate mu;
    mu.mu_hat = Vector::Constant(p, 0.5);
    const BootstrapCovariance cov =
        build_dhat_factors(precision, moments, mu, Matrix::Identity(p, p));
    auto gen = make_stream(1, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_w(cov, gen));
    }
}
BENCHMARK(BM_BootstrapDraw)->Arg(10)->Arg(20)->Arg(40);

void BM_FullReplication(benchmark::State& state) {
    ExperimentConfig cfg;
    cfg.design.kind = DesignSpec::Kind::banded;
    cfg.n = 30;
    cfg.p = 10;
    cfg.innovation.family = InnovationSpec::Family::student_t;
    cfg.innovation.df = 10;
    cfg.replications = 1;
    cfg.bootstrap_draws = 1000;
    cfg.master_seed = 3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_replication(cfg, 0));
    }
}
BENCHMARK(BM_FullReplication)->Unit(benchmark::kMillisecond);

}  // namespace
