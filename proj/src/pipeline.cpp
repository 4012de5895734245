#include "ssou/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "ssou/errors.hpp"

namespace ssou {

namespace {

Vec5 moment_start(const MomentEstimate& m, const EstimateOptions& opt) {
    Vec5 s;
    s << opt.lambda0, opt.mu0, m.alpha_hat, m.sigma_hat, m.beta_hat;
    return opt.optimizer.bounds.project(s);
}

RateFn rate_fn(const SamplingScheme& scheme) {
    if (!(scheme.h() < 1.0)) return {};
    return [scheme](const Vec5& x) { return rate_matrix(ModelParams::from_vec(x), scheme); };
}

void run_optimizer(EstimationResult& res, Objective obj, const ObservedPath& path, const Vec5& start,
                   const OptimizerConfig& cfg, const EstimateOptions& opt) {
    auto f = [&](const Vec5& x) {
        return evaluate(obj, ModelParams::from_vec(x), path, Derivatives::Gradient, opt.objective);
    };
    try {
        const OptResult r = maximize(f, start, cfg, rate_fn(path.scheme));
        res.theta_hat = r.theta;
        res.loglik = r.value;
        res.converged = r.converged;
        res.iterations += r.iterations;
        res.evaluations += r.evaluations;
        res.reason = r.reason;
        res.grad_norm = r.grad_norm;
    } catch (const NoAscentError& e) {
        res.theta_hat = start;
        res.converged = false;
        res.reason = e.what();
    }
}

void attach_information(EstimationResult& res, Objective obj, const ObservedPath& path, const EstimateOptions& opt) {
    if (!opt.information || !(path.scheme.h() < 1.0)) return;
    const ModelParams th = ModelParams::from_vec(res.theta_hat);
    const ObjectiveEval ev = evaluate(obj, th, path, Derivatives::Hessian, opt.objective);
    if (!ev.valid) return;
    res.rate = rate_matrix(th, path.scheme);
    const InformationReport rep = normalized_information(ev.hessian, res.rate);
    res.has_info = true;
    res.info = rep.info;
    res.info_min_eig = rep.min_eigenvalue;
    if (rep.min_eigenvalue > 0.0) res.std_err = standard_errors(rep.info, res.rate);
}

}  // namespace

const char* to_string(Method m) {
    switch (m) {
        case Method::Moment: return "moment";
        case Method::Qmle: return "qmle";
        case Method::Mle: return "mle";
        case Method::Timescale: return "timescale";
    }
    return "?";
}

Method parse_method(const std::string& s) {
    if (s == "moment") return Method::Moment;
    if (s == "qmle") return Method::Qmle;
    if (s == "mle") return Method::Mle;
    if (s == "timescale") return Method::Timescale;
    throw InvalidInput("unknown method '" + s + "' (expected moment, qmle, mle or timescale)");
}

ModelParams to_time_scaled(const TimeScaleParams& p) {
    require(p.tau > 0.0, "time scale: tau must be positive");
    const double t = std::tan(p.alpha * std::numbers::pi / 2.0);
    const double s = std::pow(p.tau, 1.0 / p.alpha);
    return ModelParams{p.lambda * p.tau, p.mu * p.tau + p.beta * (s - p.tau) * t, p.alpha, s, p.beta};
}

TimeScaleParams from_time_scaled(const ModelParams& q) {
    require(q.sigma > 0.0, "time scale: sigma must be positive");
    const double tau = std::pow(q.sigma, q.alpha);
    const double t = std::tan(q.alpha * std::numbers::pi / 2.0);
    TimeScaleParams p;
    p.alpha = q.alpha;
    p.beta = q.beta;
    p.tau = tau;
    p.lambda = q.lambda / tau;
    p.mu = (q.mu - q.beta * (q.sigma - tau) * t) / tau;
    return p;
}

EstimationResult estimate(const ObservedPath& path, Method method, const EstimateOptions& opt) {
    path.validate();
    const auto t0 = std::chrono::steady_clock::now();
    EstimationResult res;
    res.method = method;

    if (method == Method::Moment) {
        res.moments = estimate_moments(path, opt.moments);
        res.theta_hat[kAlpha] = res.moments.alpha_hat;
        res.theta_hat[kSigma] = res.moments.sigma_hat;
        res.theta_hat[kBeta] = res.moments.beta_hat;
        res.converged = true;
        res.reason = res.moments.alpha_clamped || res.moments.beta_clamped ? "moment ratio clamped to bracket" : "closed form";
    } else if (method == Method::Qmle || method == Method::Mle) {
        const Objective obj = method == Method::Qmle ? Objective::Quasi : Objective::Exact;
        res.moments = estimate_moments(path, opt.moments);
        run_optimizer(res, obj, path, moment_start(res.moments, opt), opt.optimizer, opt);
        attach_information(res, obj, path, opt);
    } else {
        // Time-scale variant: the grid is read as s_j = j / n on [0, 1].
        ObservedPath unit = path;
        unit.scheme = SamplingScheme(1.0, path.n());
        res.moments = estimate_moments(unit, opt.moments);
        const Vec5 start = moment_start(res.moments, opt);
        res.tau = std::pow(start[kSigma], start[kAlpha]);
        // Step 2: quasi-likelihood in (lambda, mu) with the noise parameters held at the moment fit.
        OptimizerConfig pinned = opt.optimizer;
        for (int k : {int(kAlpha), int(kSigma), int(kBeta)}) pinned.bounds.lo[k] = pinned.bounds.hi[k] = start[k];
        run_optimizer(res, Objective::Quasi, unit, start, pinned, opt);
        res.stepwise = res.theta_hat;
        if (opt.timescale_refine) run_optimizer(res, Objective::Quasi, unit, res.stepwise, opt.optimizer, opt);
        const TimeScaleParams o = from_time_scaled(ModelParams::from_vec(res.theta_hat));
        res.tau = o.tau;
        res.original << o.lambda, o.mu, o.alpha, std::pow(o.tau, 1.0 / o.alpha), o.beta;
        attach_information(res, Objective::Quasi, unit, opt);
    }
    res.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace ssou
