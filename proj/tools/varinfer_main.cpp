// varinfer: simulation and bootstrap-assisted simultaneous inference for
// high-dimensional VAR transition matrices. All randomness flows from the
// config seed; rerunning a command with the same config reproduces every
// numeric output byte for byte.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "varinfer/csv.hpp"
#include "varinfer/experiments.hpp"
#include "varinfer/pipeline.hpp"
#include "varinfer/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace varinfer;

namespace {

constexpr const char* kVersion = "0.1.0";

// exit codes: 2 config/input parse, 3 model instability, 4 degenerate mu,
// 5 pilot non-convergence, 1 anything else
[[noreturn]] void fail(int code, const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    std::exit(code);
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(2, "cannot open config: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(2, path + ": " + e.what());
    }
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) {
            fail(2, where + ": unknown key '" + key + "'");
        }
    }
}

template <typename T>
T require(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) fail(2, where + ": missing required key '" + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        fail(2, where + ": bad value for '" + key + "'");
    }
}

InnovationSpec parse_innovation(const json& obj) {
    check_keys(obj, {"family", "df", "scale", "standardize"}, "innovation");
    InnovationSpec spec;
    const std::string fam = require<std::string>(obj, "family", "innovation");
    if (fam == "gaussian") {
        spec.family = InnovationSpec::Family::gaussian;
    } else if (fam == "student_t") {
        spec.family = InnovationSpec::Family::student_t;
        spec.df = require<double>(obj, "df", "innovation");
    } else if (fam == "laplace") {
        spec.family = InnovationSpec::Family::laplace;
    } else {
        fail(2, "innovation.family: expected gaussian, student_t, or laplace");
    }
    spec.scale = obj.value("scale", 1.0);
    spec.standardize = obj.value("standardize", false);
    try {
        spec.validate();
    } catch (const ConfigError& e) {
        fail(2, e.what());
    }
    return spec;
}

DesignSpec parse_design(const json& obj, const fs::path& base) {
    check_keys(obj, {"type", "lambda", "s", "path"}, "design");
    DesignSpec d;
    const std::string type = require<std::string>(obj, "type", "design");
    if (type == "banded") {
        d.kind = DesignSpec::Kind::banded;
        d.lambda = obj.value("lambda", 0.5);
        d.s = require<int>(obj, "s", "design");
    } else if (type == "block_diagonal") {
        d.kind = DesignSpec::Kind::block_diagonal;
        d.s = require<int>(obj, "s", "design");
    } else if (type == "matrix") {
        d.kind = DesignSpec::Kind::explicit_matrix;
        const auto p = fs::path(require<std::string>(obj, "path", "design"));
        d.matrix = read_matrix_csv((p.is_absolute() ? p : base / p).string());
    } else {
        fail(2, "design.type: expected banded, block_diagonal, or matrix");
    }
    return d;
}

PipelineOptions parse_pipeline(const json& cfg) {
    PipelineOptions opts;
    if (cfg.contains("loss")) {
        const std::string kind = cfg.at("loss").get<std::string>();
        if (kind == "smoothed_huber_1") {
            opts.loss.kind = LossKind::smoothed_huber_1;
        } else if (kind == "smoothed_huber_2") {
            opts.loss.kind = LossKind::smoothed_huber_2;
        } else {
            fail(2, "loss: expected smoothed_huber_1 or smoothed_huber_2");
        }
    }
    if (cfg.contains("threshold_T")) opts.threshold_T = cfg.at("threshold_T").get<double>();
    opts.threshold_quantile = cfg.value("threshold_quantile", 0.95);
    if (cfg.contains("pilot_lambda")) opts.pilot_lambda = cfg.at("pilot_lambda").get<double>();
    opts.pilot_c = cfg.value("pilot_c", 0.5);
    if (cfg.contains("clime_lambda")) opts.clime_lambda = cfg.at("clime_lambda").get<double>();
    opts.clime_c = cfg.value("clime_c", 0.5);
    opts.mu_floor = cfg.value("mu_floor", 1e-3);
    opts.solver.max_iter = cfg.value("max_iter", 5000);
    opts.solver.tol = cfg.value("tol", 1e-8);
    opts.bootstrap_draws = cfg.value("bootstrap_draws", 1000);
    opts.alpha = cfg.value("alpha", 0.05);
    opts.override_mu_floor = cfg.value("override_mu_floor", false);
    opts.override_convergence = cfg.value("override_convergence", false);
    return opts;
}

const std::set<std::string> kPipelineKeys = {
    "loss",        "threshold_T",   "threshold_quantile", "pilot_lambda",
    "pilot_c",     "clime_lambda",  "clime_c",            "mu_floor",
    "max_iter",    "tol",           "bootstrap_draws",    "alpha",
    "override_mu_floor", "override_convergence"};

std::set<std::string> with_pipeline(std::set<std::string> extra) {
    extra.insert(kPipelineKeys.begin(), kPipelineKeys.end());
    return extra;
}

std::string digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct ManifestWriter {
    std::string command;
    std::string config_digest;
    std::int64_t master_seed = 0;
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    // stdout carries only the manifest path
    void finish(const fs::path& out_dir) const {
        json m;
        m["command"] = command;
        m["config_digest"] = config_digest;
        m["master_seed"] = master_seed;
        m["artifact_version"] = kVersion;
        m["outputs"] = outputs;
        m["wall_time_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        const fs::path path = out_dir / "manifest.json";
        std::ofstream out(path);
        out << m.dump(2) << "\n";
        std::cout << path.string() << "\n";
    }
};

json innovation_to_json(const InnovationSpec& spec) {
    json j;
    switch (spec.family) {
        case InnovationSpec::Family::gaussian: j["family"] = "gaussian"; break;
        case InnovationSpec::Family::student_t: j["family"] = "student_t"; break;
        case InnovationSpec::Family::laplace: j["family"] = "laplace"; break;
    }
    if (spec.family == InnovationSpec::Family::student_t) j["df"] = spec.df;
    j["scale"] = spec.scale;
    j["standardize"] = spec.standardize;
    return j;
}

int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const Unstable& e) {
        fail(3, e.what());
    } catch (const DegenerateMu& e) {
        fail(4, std::string(e.what()) + " (pass override_mu_floor to proceed)");
    } catch (const NotConverged& e) {
        fail(5, std::string(e.what()) + " (pass override_convergence to proceed)");
    } catch (const IoError& e) {
        fail(2, e.what());
    } catch (const ConfigError& e) {
        fail(2, e.what());
    } catch (const Error& e) {
        fail(1, e.what());
    }
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const std::string& config_path, const fs::path& out_dir,
                 std::optional<std::int64_t> seed_flag) {
    const json cfg = load_json(config_path);
    check_keys(cfg,
               {"design", "n", "p", "innovation", "burn_in", "seed", "decay_threshold"},
               "simulate config");
    const int n = require<int>(cfg, "n", "config");
    const int p = require<int>(cfg, "p", "config");
    if (!cfg.contains("design")) fail(2, "config: missing required key 'design'");
    const DesignSpec design = parse_design(cfg.at("design"), fs::path(config_path).parent_path());
    const InnovationSpec innovation =
        parse_innovation(cfg.contains("innovation") ? cfg.at("innovation") : json{{"family", "gaussian"}});
    const std::int64_t seed = seed_flag ? *seed_flag : cfg.value("seed", std::int64_t{1});
    const double decay_threshold = cfg.value("decay_threshold", 0.5);

    const TransitionMatrix a = design.build(p, seed, decay_threshold);
    const int burn_in = cfg.contains("burn_in") ? cfg.at("burn_in").get<int>()
                                                : default_burn_in(a, n);
    const VarSample sample = simulate(a, innovation, n, burn_in, seed);

    fs::create_directories(out_dir);
    ManifestWriter manifest{"simulate", digest_file(config_path), seed};

    const fs::path series_path = out_dir / "sample.csv";
    write_series_csv(series_path.string(), sample);
    manifest.outputs.push_back(series_path.string());

    json meta;
    meta["seed"] = seed;
    meta["n"] = n;
    meta["p"] = p;
    meta["burn_in"] = burn_in;
    meta["innovation"] = innovation_to_json(innovation);
    meta["design"] = design.name();
    meta["decay_threshold"] = decay_threshold;
    meta["spectral_radius"] = a.spectral_radius;
    meta["decay_index"] = a.decay_index;
    meta["decay_gamma"] = a.decay_gamma;
    const fs::path meta_path = out_dir / "sample_meta.json";
    std::ofstream(meta_path) << meta.dump(2) << "\n";
    manifest.outputs.push_back(meta_path.string());

    const fs::path a_path = out_dir / "transition.csv";
    write_matrix_csv(a_path.string(), a.entries);
    manifest.outputs.push_back(a_path.string());

    manifest.finish(out_dir);
    return 0;
}

// --------------------------------------------------------------- fit/test

json fit_to_json(const FitResult& fit) {
    json j;
    j["threshold_T"] = fit.weight.threshold;
    j["pilot_lambda"] = fit.pilot_lambda;
    j["clime_lambda"] = fit.clime_lambda;
    j["pilot_iterations"] = fit.pilot.iterations_per_row;
    j["pilot_kkt_residual"] = fit.pilot.kkt_residual;
    std::vector<bool> conv(fit.pilot.converged.begin(), fit.pilot.converged.end());
    j["pilot_converged"] = conv;
    j["mu_hat"] = std::vector<double>(fit.mu.mu_hat.data(),
                                      fit.mu.mu_hat.data() + fit.mu.mu_hat.size());
    j["clime_feasibility_gap"] = fit.precision.feasibility_gap;
    j["psd_clip_magnitude"] = fit.cov.psd_clip_magnitude;
    j["correction_max"] = fit.debiased.correction_max;
    return j;
}

int cmd_fit(const std::string& data_path, const std::string& config_path,
            const fs::path& out_dir) {
    const json cfg = load_json(config_path);
    check_keys(cfg, with_pipeline({"seed"}), "fit config");
    const PipelineOptions opts = parse_pipeline(cfg);

    VarSample sample = read_series_csv(data_path);
    const FitResult fit = run_fit(sample, opts);

    fs::create_directories(out_dir);
    ManifestWriter manifest{"fit", digest_file(config_path),
                            cfg.value("seed", std::int64_t{0})};
    const fs::path beta_hat_path = out_dir / "beta_hat.csv";
    write_matrix_csv(beta_hat_path.string(), fit.pilot.beta_hat);
    manifest.outputs.push_back(beta_hat_path.string());
    const fs::path beta_check_path = out_dir / "beta_check.csv";
    write_matrix_csv(beta_check_path.string(), fit.debiased.beta_check);
    manifest.outputs.push_back(beta_check_path.string());
    const fs::path omega_path = out_dir / "omega_x.csv";
    write_matrix_csv(omega_path.string(), fit.precision.omega);
    manifest.outputs.push_back(omega_path.string());
    const fs::path diag_path = out_dir / "fit.json";
    std::ofstream(diag_path) << fit_to_json(fit).dump(2) << "\n";
    manifest.outputs.push_back(diag_path.string());
    manifest.finish(out_dir);
    return 0;
}

int cmd_test(const std::string& data_path, const std::string& beta0_path,
             const std::string& config_path, const fs::path& out_dir,
             bool dump_w_draws) {
    const json cfg = load_json(config_path);
    check_keys(cfg, with_pipeline({"seed"}), "test config");
    const PipelineOptions opts = parse_pipeline(cfg);
    const std::int64_t seed = cfg.value("seed", std::int64_t{1});

    VarSample sample = read_series_csv(data_path);
    const Matrix beta0 = read_matrix_csv(beta0_path);
    if (beta0.rows() != sample.p || beta0.cols() != sample.p) {
        fail(2, "beta0 must be p x p = " + std::to_string(sample.p) + "x" +
                    std::to_string(sample.p));
    }
    const PipelineResult res = run_test(sample, beta0, opts, seed);

    fs::create_directories(out_dir);
    ManifestWriter manifest{"test", digest_file(config_path), seed};

    json report;
    report["statistic"] = res.report.statistic;
    report["critical_value"] = res.report.critical;
    report["alpha"] = res.report.alpha;
    report["reject_global"] = res.report.reject_global;
    report["p_value"] = res.report.p_value;
    report["seed"] = seed;
    json rejected = json::array();
    for (const auto& [j, k] : res.report.rejected_entries) {
        rejected.push_back({j, k});
    }
    report["rejected_entries"] = rejected;
    report["fit"] = fit_to_json(res.fit);
    const fs::path report_path = out_dir / "report.json";
    std::ofstream(report_path) << report.dump(2) << "\n";
    manifest.outputs.push_back(report_path.string());

    const fs::path beta_check_path = out_dir / "beta_check.csv";
    write_matrix_csv(beta_check_path.string(), res.fit.debiased.beta_check);
    manifest.outputs.push_back(beta_check_path.string());

    if (dump_w_draws) {
        const fs::path w_path = out_dir / "w_draws.csv";
        std::ofstream w_out(w_path);
        for (double w : res.report.w_draws) w_out << format_double(w) << "\n";
        manifest.outputs.push_back(w_path.string());
    }
    manifest.finish(out_dir);
    return 0;
}

// -------------------------------------------------------------- experiment

std::string df_tag(const InnovationSpec& spec) {
    if (spec.family == InnovationSpec::Family::student_t) {
        const double df = spec.df;
        if (df == static_cast<int>(df)) return "t" + std::to_string(static_cast<int>(df));
        return "t" + std::to_string(df);
    }
    return spec.family == InnovationSpec::Family::gaussian ? "gaussian" : "laplace";
}

int cmd_experiment(const std::string& config_path, const fs::path& out_dir,
                   std::optional<std::int64_t> seed_flag, int workers_flag) {
    const json cfg = load_json(config_path);
    check_keys(cfg,
               with_pipeline({"designs", "design", "n", "p", "innovations", "innovation",
                              "replications", "master_seed", "decay_threshold",
                              "power_delta", "power_row", "power_col", "workers"}),
               "experiment config");

    ExperimentConfig base;
    base.n = require<int>(cfg, "n", "config");
    base.p = require<int>(cfg, "p", "config");
    base.replications = cfg.value("replications", 100);
    base.bootstrap_draws = cfg.value("bootstrap_draws", 1000);
    base.alpha = cfg.value("alpha", 0.05);
    base.master_seed = seed_flag ? *seed_flag : cfg.value("master_seed", std::int64_t{1});
    base.decay_threshold = cfg.value("decay_threshold", 0.5);
    base.power_delta = cfg.value("power_delta", 0.0);
    base.power_row = cfg.value("power_row", 0);
    base.power_col = cfg.value("power_col", 0);
    base.workers = workers_flag > 0 ? workers_flag : cfg.value("workers", 1);
    base.pipeline = parse_pipeline(cfg);

    std::vector<DesignSpec> designs;
    const fs::path base_dir = fs::path(config_path).parent_path();
    if (cfg.contains("designs")) {
        for (const auto& d : cfg.at("designs")) designs.push_back(parse_design(d, base_dir));
    } else if (cfg.contains("design")) {
        designs.push_back(parse_design(cfg.at("design"), base_dir));
    } else {
        fail(2, "config: need 'design' or 'designs'");
    }
    std::vector<InnovationSpec> innovations;
    if (cfg.contains("innovations")) {
        for (const auto& v : cfg.at("innovations")) innovations.push_back(parse_innovation(v));
    } else if (cfg.contains("innovation")) {
        innovations.push_back(parse_innovation(cfg.at("innovation")));
    } else {
        fail(2, "config: need 'innovation' or 'innovations'");
    }

    fs::create_directories(out_dir);
    ManifestWriter manifest{"experiment", digest_file(config_path), base.master_seed};

    std::vector<SizeCoverageRow> rows;
    int total = 0, total_failed = 0;
    for (const DesignSpec& design : designs) {
        for (const InnovationSpec& innovation : innovations) {
            ExperimentConfig config = base;
            config.design = design;
            config.innovation = innovation;
            const ExperimentSummary summary = run_experiment(config);
            rows.push_back(summarize(summary));
            total += config.replications;
            total_failed += summary.failures;

            std::vector<double> stats;
            std::vector<double> pool;
            for (const auto& rec : summary.records) {
                if (rec.failed) {
                    std::cerr << "replication " << rec.rep_index << " failed: "
                              << rec.error << "\n";
                    continue;
                }
                stats.push_back(rec.statistic);
                pool.insert(pool.end(), rec.w_draws.begin(), rec.w_draws.end());
            }
            if (!stats.empty()) {
                const auto qq = qq_data(stats, pool);
                const fs::path qq_path =
                    out_dir / ("qq_" + design.name() + "_" + df_tag(innovation) + ".csv");
                std::ofstream qq_out(qq_path);
                qq_out << "stat_quantile,w_quantile\n";
                for (const auto& [sq, wq] : qq) {
                    qq_out << format_double(sq) << ',' << format_double(wq) << "\n";
                }
                manifest.outputs.push_back(qq_path.string());
            }
        }
    }

    const fs::path table_path = out_dir / "size_table.csv";
    std::ofstream table(table_path);
    table << "design,df,n,p,alpha,size,coverage,mean_critical,failures,replications\n";
    for (const auto& r : rows) {
        table << r.design << ',' << format_double(r.df) << ',' << r.n << ',' << r.p
              << ',' << format_double(r.alpha) << ',' << format_double(r.size) << ','
              << format_double(r.coverage) << ',' << format_double(r.mean_critical)
              << ',' << r.failures << ',' << r.replications << "\n";
    }
    table.close();
    manifest.outputs.push_back(table_path.string());
    manifest.finish(out_dir);

    if (total > 0 && total_failed * 5 > total) {
        fail(1, "more than 20% of replications failed (" + std::to_string(total_failed) +
                    "/" + std::to_string(total) + ")");
    }
    return 0;
}

int cmd_qq(const std::string& stats_path, const std::string& draws_path,
           const fs::path& out_dir) {
    const Matrix stats_m = read_matrix_csv(stats_path);
    const Matrix draws_m = read_matrix_csv(draws_path);
    std::vector<double> stats(stats_m.data(), stats_m.data() + stats_m.size());
    std::vector<double> pool(draws_m.data(), draws_m.data() + draws_m.size());

    fs::create_directories(out_dir);
    ManifestWriter manifest{"qq", digest_file(stats_path), 0};
    const auto qq = qq_data(stats, pool);
    const fs::path qq_path = out_dir / "qq.csv";
    std::ofstream out(qq_path);
    out << "stat_quantile,w_quantile\n";
    for (const auto& [sq, wq] : qq) {
        out << format_double(sq) << ',' << format_double(wq) << "\n";
    }
    manifest.outputs.push_back(qq_path.string());
    manifest.finish(out_dir);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"De-biased robust estimation and bootstrap-assisted simultaneous "
                 "inference for high-dimensional VAR transition matrices"};
    app.require_subcommand(1);

    std::string config_path, data_path, beta0_path, stats_path, draws_path;
    std::string out_dir = ".";
    std::int64_t seed = 0;
    bool seed_set = false;
    int workers = 0;
    bool dump_w = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out-dir", out_dir, "output directory");
        sub->add_option("--seed", seed, "master seed (overrides config)")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--workers", workers, "worker thread count");
    };

    auto* sim = app.add_subcommand("simulate", "simulate a stationary VAR(1) path");
    sim->add_option("--config", config_path, "JSON config")->required();
    add_common(sim);

    auto* fit = app.add_subcommand("fit", "pilot + de-biased fit on supplied data");
    fit->add_option("--data", data_path, "series CSV")->required();
    fit->add_option("--config", config_path, "JSON config")->required();
    add_common(fit);

    auto* test = app.add_subcommand("test", "simultaneous test of H0: A = beta0");
    test->add_option("--data", data_path, "series CSV")->required();
    test->add_option("--beta0", beta0_path, "hypothesized transition matrix CSV")->required();
    test->add_option("--config", config_path, "JSON config")->required();
    test->add_flag("--w-draws", dump_w, "also write the bootstrap draws");
    add_common(test);

    auto* exp = app.add_subcommand("experiment", "Monte Carlo replication grid");
    exp->add_option("--config", config_path, "JSON config")->required();
    add_common(exp);

    auto* qq = app.add_subcommand("qq", "paired quantiles from statistics and draws");
    qq->add_option("--stats", stats_path, "statistics CSV (one column)")->required();
    qq->add_option("--draws", draws_path, "pooled W draws CSV (one column)")->required();
    add_common(qq);

    CLI11_PARSE(app, argc, argv);

    const std::optional<std::int64_t> seed_flag =
        seed_set ? std::optional<std::int64_t>(seed) : std::nullopt;

    return run_guarded([&]() -> int {
        if (sim->parsed()) return cmd_simulate(config_path, out_dir, seed_flag);
        if (fit->parsed()) return cmd_fit(data_path, config_path, out_dir);
        if (test->parsed()) return cmd_test(data_path, beta0_path, config_path, out_dir, dump_w);
        if (exp->parsed()) return cmd_experiment(config_path, out_dir, seed_flag, workers);
        if (qq->parsed()) return cmd_qq(stats_path, draws_path, out_dir);
        return 1;
    });
}
