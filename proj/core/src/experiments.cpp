#include "varinfer/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "varinfer/rng.hpp"

namespace varinfer {

TransitionMatrix banded_design(int p, int s, double lambda, double decay_threshold) {
    if (s < 1 || s >= p) throw ConfigError("banded_design: need 1 <= s < p");
    if (lambda <= 0.0 || lambda >= 1.0) {
        throw ConfigError("banded_design: lambda must lie in (0,1)");
    }
    Matrix raw(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            const int d = std::abs(i - j);
            raw(i, j) = d <= s ? std::pow(lambda, d) : 0.0;
        }
    }
    const double rho = spectral_radius(raw);
    if (rho <= 0.0) throw DegenerateDesign("banded_design: zero spectral radius");
    return TransitionMatrix::stable(raw / (2.0 * rho), decay_threshold);
}

TransitionMatrix block_diagonal_design(int p, int s, std::int64_t seed,
                                       double decay_threshold) {
    if (s < 1) throw ConfigError("block_diagonal_design: s must be >= 1");
    auto gen = make_stream(static_cast<std::uint64_t>(seed), 0x6b1a);
    std::uniform_real_distribution<double> unif(-0.8, 0.8);
    Matrix a = Matrix::Zero(p, p);
    for (int start = 0; start < p; start += s) {
        const int size = std::min(s, p - start);
        const double lam = unif(gen);
        for (int i = 0; i < size; ++i) {
            a(start + i, start + i) = lam;
            if (i + 1 < size) a(start + i, start + i + 1) = lam * lam;
        }
    }
    return TransitionMatrix::stable(a, decay_threshold);
}

TransitionMatrix DesignSpec::build(int p, std::int64_t seed,
                                   double decay_threshold) const {
    switch (kind) {
        case Kind::banded:
            return banded_design(p, s, lambda, decay_threshold);
        case Kind::block_diagonal:
            return block_diagonal_design(p, s, seed, decay_threshold);
        case Kind::explicit_matrix:
            if (matrix.rows() != p || matrix.cols() != p) {
                throw ConfigError("design matrix is not p x p");
            }
            return TransitionMatrix::stable(matrix, decay_threshold);
    }
    throw ConfigError("unknown design kind");
}

std::string DesignSpec::name() const {
    switch (kind) {
        case Kind::banded: return "banded";
        case Kind::block_diagonal: return "block_diagonal";
        case Kind::explicit_matrix: return "matrix";
    }
    return "unknown";
}

void ExperimentConfig::validate() const {
    if (n < 2 || p < 1) throw ConfigError("experiment: need n >= 2 and p >= 1");
    if (replications < 1) throw ConfigError("experiment: replications must be >= 1");
    if (bootstrap_draws < 1) throw ConfigError("experiment: bootstrap_draws must be >= 1");
    if (alpha <= 0.0 || alpha >= 1.0) throw ConfigError("experiment: alpha not in (0,1)");
    innovation.validate();
    if (innovation.scale == 0.0) {
        throw ConfigError("experiment: zero innovation scale is degenerate");
    }
    if (workers < 1) throw ConfigError("experiment: workers must be >= 1");
}

namespace {

std::int64_t sub_seed(std::int64_t master, std::uint64_t tag, int rep) {
    return static_cast<std::int64_t>(
        splitmix64(static_cast<std::uint64_t>(master) ^
                   splitmix64(tag + static_cast<std::uint64_t>(rep))));
}

}  // namespace

ReplicationRecord run_replication(const ExperimentConfig& config, int rep_index) {
    ReplicationRecord rec;
    rec.rep_index = rep_index;
    try {
        const TransitionMatrix truth =
            config.design.build(config.p, config.master_seed, config.decay_threshold);
        const std::int64_t sim_seed = sub_seed(config.master_seed, 0x5150, rep_index);
        const std::int64_t boot_seed = sub_seed(config.master_seed, 0xb007, rep_index);
        const VarSample sample = simulate(truth, config.innovation, config.n, sim_seed);

        Matrix beta0 = truth.entries;
        if (config.power_delta != 0.0) {
            beta0(config.power_row, config.power_col) += config.power_delta;
        }

        PipelineOptions opts = config.pipeline;
        opts.bootstrap_draws = config.bootstrap_draws;
        opts.alpha = config.alpha;
        const PipelineResult res = run_test(sample, beta0, opts, boot_seed);
        rec.statistic = res.report.statistic;
        rec.c_alpha = res.report.critical;
        rec.reject = res.report.reject_global;
        rec.p_value = res.report.p_value;
        rec.w_draws = res.report.w_draws;
    } catch (const Error& e) {
        rec.failed = true;
        rec.error = e.what();
    }
    return rec;
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
    config.validate();
    ExperimentSummary summary;
    summary.config = config;
    summary.records.resize(static_cast<std::size_t>(config.replications));

    const int workers = std::min(config.workers, config.replications);
    if (workers <= 1) {
        for (int r = 0; r < config.replications; ++r) {
            summary.records[static_cast<std::size_t>(r)] = run_replication(config, r);
        }
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (int r = w; r < config.replications; r += workers) {
                    summary.records[static_cast<std::size_t>(r)] = run_replication(config, r);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    int ok = 0, rejects = 0, covered = 0;
    double c_sum = 0.0;
    for (const auto& rec : summary.records) {
        if (rec.failed) {
            ++summary.failures;
            continue;
        }
        ++ok;
        if (rec.reject) ++rejects;
        if (rec.statistic <= rec.c_alpha) ++covered;
        c_sum += rec.c_alpha;
    }
    if (ok > 0) {
        summary.empirical_size = static_cast<double>(rejects) / ok;
        summary.coverage = static_cast<double>(covered) / ok;
        summary.mean_critical = c_sum / ok;
    }
    return summary;
}

double empirical_quantile(std::vector<double> v, double q) {
    if (v.empty()) throw EmptyInput("empirical_quantile: empty sample");
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    // inverse of the midpoint ecdf (i - 0.5)/n, interpolated
    const double h = q * n - 0.5;
    if (h <= 0.0) return v.front();
    if (h >= n - 1.0) return v.back();
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

std::vector<std::pair<double, double>> qq_data(const std::vector<double>& statistics,
                                               const std::vector<double>& w_pool) {
    if (statistics.empty() || w_pool.empty()) throw EmptyInput("qq_data: empty input");
    std::vector<double> stats = statistics;
    std::sort(stats.begin(), stats.end());
    std::vector<double> pool = w_pool;
    std::sort(pool.begin(), pool.end());
    const std::size_t r = stats.size();
    std::vector<std::pair<double, double>> out;
    out.reserve(r);
    for (std::size_t i = 1; i <= r; ++i) {
        const double q = (static_cast<double>(i) - 0.5) / static_cast<double>(r);
        out.emplace_back(stats[i - 1], empirical_quantile(pool, q));
    }
    return out;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw EmptyInput("ks_distance: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        // consume every observation tied at the current value in both samples
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        const double fa = static_cast<double>(i) / static_cast<double>(a.size());
        const double fb = static_cast<double>(j) / static_cast<double>(b.size());
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

SizeCoverageRow summarize(const ExperimentSummary& summary) {
    SizeCoverageRow row;
    row.design = summary.config.design.name();
    row.df = summary.config.innovation.family == InnovationSpec::Family::student_t
                 ? summary.config.innovation.df
                 : 0.0;
    row.n = summary.config.n;
    row.p = summary.config.p;
    row.alpha = summary.config.alpha;
    row.size = summary.empirical_size;
    row.coverage = summary.coverage;
    row.mean_critical = summary.mean_critical;
    row.failures = summary.failures;
    row.replications = summary.config.replications;
    return row;
}

}  // namespace varinfer
