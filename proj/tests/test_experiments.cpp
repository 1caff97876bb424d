#include <doctest.h>

#include <cmath>
#include <vector>

#include "varinfer/experiments.hpp"

using namespace varinfer;

TEST_CASE("banded design has spectral radius exactly one half") {
    for (int p : {5, 10, 20}) {
        for (double lambda : {0.3, 0.5, 0.8}) {
            const TransitionMatrix a = banded_design(p, 2, lambda);
            CHECK(a.spectral_radius == doctest::Approx(0.5).epsilon(1e-10));
            // band structure survives the rescale
            for (int i = 0; i < p; ++i) {
                for (int j = 0; j < p; ++j) {
                    if (std::abs(i - j) > 2) CHECK(a.entries(i, j) == 0.0);
                }
            }
        }
    }
}

TEST_CASE("banded design entry ratios follow the geometric band") {
    const TransitionMatrix a = banded_design(6, 2, 0.4);
    CHECK(a.entries(0, 1) / a.entries(0, 0) == doctest::Approx(0.4));
    CHECK(a.entries(0, 2) / a.entries(0, 0) == doctest::Approx(0.16));
}

TEST_CASE("block diagonal design is stable, block-structured, reproducible") {
    const int p = 10, s = 5;
    const TransitionMatrix a = block_diagonal_design(p, s, 7);
    CHECK(a.spectral_radius < 0.8);
    // off-block entries vanish; within a block only diag and superdiag
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            const bool same_block = (i / s) == (j / s);
            const bool structural = same_block && (j == i || j == i + 1);
            if (!structural) CHECK(a.entries(i, j) == 0.0);
        }
    }
    // superdiagonal = diagonal squared inside each block
    for (int i = 0; i < p; ++i) {
        if ((i / s) == ((i + 1) / s)) {
            CHECK(a.entries(i, i + 1) ==
                  doctest::Approx(a.entries(i, i) * a.entries(i, i)));
        }
    }
    const TransitionMatrix b = block_diagonal_design(p, s, 7);
    CHECK(a.entries == b.entries);
    const TransitionMatrix c = block_diagonal_design(p, s, 8);
    CHECK(a.entries != c.entries);
}

TEST_CASE("empirical quantile uses the midpoint convention") {
    std::vector<double> xs = {4.0, 1.0, 3.0, 2.0};  // unsorted on purpose
    // q = (i - 0.5)/4 hits the order statistics exactly
    CHECK(empirical_quantile(xs, 0.125) == doctest::Approx(1.0));
    CHECK(empirical_quantile(xs, 0.375) == doctest::Approx(2.0));
    CHECK(empirical_quantile(xs, 0.875) == doctest::Approx(4.0));
    // midway between the 0.125 and 0.375 grid points interpolates linearly
    CHECK(empirical_quantile(xs, 0.25) == doctest::Approx(1.5));
    // tails clamp to the extremes
    CHECK(empirical_quantile(xs, 0.01) == doctest::Approx(1.0));
    CHECK(empirical_quantile(xs, 0.99) == doctest::Approx(4.0));
    CHECK_THROWS_AS(empirical_quantile({}, 0.5), EmptyInput);
}

TEST_CASE("qq data pairs quantiles of the two samples") {
    std::vector<double> stats = {1.0, 2.0, 3.0, 4.0};
    SUBCASE("identical samples land on the diagonal") {
        const auto qq = qq_data(stats, stats);
        CHECK(qq.size() == stats.size());
        for (const auto& [x, y] : qq) CHECK(x == doctest::Approx(y));
    }
    SUBCASE("a constant shift moves the second coordinate only") {
        std::vector<double> shifted;
        for (double v : stats) shifted.push_back(v + 2.0);
        const auto qq = qq_data(stats, shifted);
        for (const auto& [x, y] : qq) CHECK(y == doctest::Approx(x + 2.0));
    }
    SUBCASE("coordinates are monotone") {
        std::vector<double> pool = {0.3, 5.0, 1.1, 2.7, 0.9, 4.2, 3.3, 1.8};
        const auto qq = qq_data(stats, pool);
        for (std::size_t i = 1; i < qq.size(); ++i) {
            CHECK(qq[i].first >= qq[i - 1].first);
            CHECK(qq[i].second >= qq[i - 1].second);
        }
    }
}

TEST_CASE("two-sample KS distance") {
    std::vector<double> a = {1.0, 2.0, 3.0, 4.0};
    CHECK(ks_distance(a, a) == doctest::Approx(0.0));
    std::vector<double> b = {10.0, 11.0, 12.0};
    CHECK(ks_distance(a, b) == doctest::Approx(1.0));  // disjoint supports
    // half of b sits below all of a, half above
    std::vector<double> c = {0.0, 0.5, 10.0, 11.0};
    CHECK(ks_distance(a, c) == doctest::Approx(0.5));
}

TEST_CASE("replication is deterministic in (master_seed, rep_index)") {
    ExperimentConfig cfg;
    cfg.design.kind = DesignSpec::Kind::banded;
    cfg.n = 30;
    cfg.p = 5;
    cfg.innovation.family = InnovationSpec::Family::student_t;
    cfg.innovation.df = 10;
    cfg.replications = 2;
    cfg.bootstrap_draws = 50;
    cfg.master_seed = 99;
    const ReplicationRecord r1 = run_replication(cfg, 0);
    const ReplicationRecord r2 = run_replication(cfg, 0);
    const ReplicationRecord r3 = run_replication(cfg, 1);
    REQUIRE_FALSE(r1.failed);
    CHECK(r1.statistic == r2.statistic);
    CHECK(r1.w_draws == r2.w_draws);
    CHECK(r1.statistic != r3.statistic);
}

TEST_CASE("experiment summary aggregates records and is worker-invariant") {
    ExperimentConfig cfg;
    cfg.design.kind = DesignSpec::Kind::banded;
    cfg.n = 30;
    cfg.p = 5;
    cfg.replications = 6;
    cfg.bootstrap_draws = 40;
    cfg.master_seed = 5;
    cfg.workers = 1;
    const ExperimentSummary s1 = run_experiment(cfg);
    cfg.workers = 3;
    const ExperimentSummary s2 = run_experiment(cfg);
    REQUIRE(s1.records.size() == 6);
    REQUIRE(s2.records.size() == 6);
    for (int i = 0; i < 6; ++i) {
        CHECK(s1.records[i].statistic == s2.records[i].statistic);
        CHECK(s1.records[i].reject == s2.records[i].reject);
    }
    // size = rejection fraction among successes
    int rejects = 0, ok = 0;
    for (const auto& r : s1.records) {
        if (!r.failed) {
            ++ok;
            rejects += r.reject ? 1 : 0;
        }
    }
    REQUIRE(ok > 0);
    CHECK(s1.empirical_size ==
          doctest::Approx(static_cast<double>(rejects) / ok));
    CHECK(s1.coverage == doctest::Approx(1.0 - s1.empirical_size));
    const SizeCoverageRow row = summarize(s1);
    CHECK(row.design == cfg.design.name());
    CHECK(row.replications == 6);
    CHECK(row.size == doctest::Approx(s1.empirical_size));
}

TEST_CASE("power mode perturbs the null and inflates rejections eventually") {
    ExperimentConfig cfg;
    cfg.design.kind = DesignSpec::Kind::banded;
    cfg.n = 100;
    cfg.p = 4;
    cfg.replications = 1;
    cfg.bootstrap_draws = 200;
    cfg.master_seed = 31;
    cfg.power_delta = 5.0;  // gross misspecification of one entry
    cfg.power_row = 0;
    cfg.power_col = 1;
    const ReplicationRecord r = run_replication(cfg, 0);
    REQUIRE_FALSE(r.failed);
    CHECK(r.reject);
}

TEST_CASE("config validation rejects bad shapes") {
    ExperimentConfig cfg;
    cfg.n = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.n = 30;
    cfg.alpha = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
