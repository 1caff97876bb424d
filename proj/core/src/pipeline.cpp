#include "varinfer/pipeline.hpp"

namespace varinfer {

FitResult run_fit(const VarSample& sample, const PipelineOptions& opts) {
    FitResult r;
    r.weight.threshold = opts.threshold_T
                             ? *opts.threshold_T
                             : default_threshold(sample, opts.threshold_quantile);
    if (r.weight.threshold <= 0.0) {
        throw ConfigError("run_fit: weight threshold T must be > 0");
    }
    r.pilot_lambda = opts.pilot_lambda
                         ? *opts.pilot_lambda
                         : default_pilot_lambda(sample.n, sample.p, r.weight, opts.pilot_c);
    r.clime_lambda = opts.clime_lambda
                         ? *opts.clime_lambda
                         : fallback_lambda_n(sample.n, sample.p, opts.clime_c);

    r.pilot = fit_all(sample, r.pilot_lambda, opts.loss, r.weight, opts.solver);
    if (!r.pilot.all_converged() && !opts.override_convergence) {
        throw NotConverged("run_fit: pilot solver did not converge on every row");
    }
    r.moments = weighted_moments(sample, r.weight);
    r.mu = mu_hat(r.pilot.residuals, opts.loss, opts.mu_floor);
    r.mu.require_valid(opts.override_mu_floor);
    r.psi_cross = psi_cross_moment(r.pilot.residuals, opts.loss);
    r.precision = clime(r.moments.sigma_x_hat, r.clime_lambda);
    r.debiased = debias(r.pilot, sample, r.precision, opts.loss, r.weight,
                        opts.override_mu_floor, opts.override_convergence,
                        opts.mu_floor);
    r.cov = build_dhat_factors(r.precision, r.moments, r.mu, r.psi_cross);
    return r;
}

PipelineResult run_test(const VarSample& sample, const Matrix& beta0,
                        const PipelineOptions& opts, std::int64_t bootstrap_seed) {
    PipelineResult out;
    out.fit = run_fit(sample, opts);
    out.report = simultaneous_test(out.fit.debiased, beta0, out.fit.cov, sample.n,
                                   opts.bootstrap_draws, opts.alpha, bootstrap_seed);
    return out;
}

}  // namespace varinfer
