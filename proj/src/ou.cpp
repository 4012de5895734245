#include "ssou/ou.hpp"

#include <cmath>

#include "ssou/errors.hpp"

namespace ssou {

const char* param_name(int k) {
    static const char* names[5] = {"lambda", "mu", "alpha", "sigma", "beta"};
    require(k >= 0 && k < 5, "param_name: index out of range");
    return names[k];
}

Vec5 ModelParams::vec() const {
    Vec5 v;
    v << lambda, mu, alpha, sigma, beta;
    return v;
}

ModelParams ModelParams::from_vec(const Vec5& v) {
    return ModelParams{v[0], v[1], v[2], v[3], v[4]};
}

void ModelParams::validate() const {
    require(std::isfinite(lambda) && std::isfinite(mu), "model: lambda and mu must be finite");
    require(std::isfinite(alpha) && alpha > 0.0 && alpha < 2.0, "model: alpha must lie in (0, 2)");
    require(std::isfinite(sigma) && sigma > 0.0, "model: sigma must be positive");
    require(std::isfinite(beta) && beta >= -1.0 && beta <= 1.0, "model: beta must lie in [-1, 1]");
}

bool ModelParams::in_estimation_region() const {
    return std::isfinite(lambda) && std::isfinite(mu) && alpha > 1.0 && alpha < 2.0 && sigma > 0.0 &&
           std::isfinite(sigma) && beta > -1.0 && beta < 1.0;
}

SamplingScheme::SamplingScheme(double T_, int n_) : T(T_), n(n_) { validate(); }

void SamplingScheme::validate() const {
    require(std::isfinite(T) && T > 0.0, "scheme: T must be positive");
    require(n >= 1, "scheme: n must be at least 1");
}

void ObservedPath::validate() const {
    scheme.validate();
    require(values.size() == static_cast<std::size_t>(scheme.n) + 1, "path: expected n + 1 observations");
    for (double v : values) require(std::isfinite(v), "path: observations must be finite");
}

XiTerms xi_terms(double alpha, double h) {
    const auto x = xi_h(ad::Jet<1>::variable(alpha, 0), h);
    return {x.v, x.g[0], x.h[0]};
}

TransitionLaw transition(const ModelParams& theta, double h) {
    theta.validate();
    require(std::isfinite(h) && h > 0.0, "transition: h must be positive");
    const auto t = transition_t(theta.lambda, theta.mu, theta.alpha, theta.sigma, theta.beta, h);
    return {t.decay, t.drift_term, t.sigma_h, t.mu_h};
}

ObservedPath simulate_path(const ModelParams& theta, double y0, const SamplingScheme& scheme, RngStream& rng) {
    theta.validate();
    scheme.validate();
    require(std::isfinite(y0), "simulate_path: y0 must be finite");
    const TransitionLaw tr = transition(theta, scheme.h());
    const StableParams noise{theta.alpha, theta.beta, tr.sigma_h, tr.mu_h};
    ObservedPath path;
    path.scheme = scheme;
    path.values.resize(static_cast<std::size_t>(scheme.n) + 1);
    path.values[0] = y0;
    for (int j = 1; j <= scheme.n; ++j)
        path.values[j] = tr.decay * path.values[j - 1] + tr.drift_term + sample_one(noise, rng);
    return path;
}

std::vector<double> euler_residuals(const ModelParams& theta, const ObservedPath& path) {
    theta.validate();
    const double h = path.scheme.h();
    const double scale = theta.sigma * std::pow(h, 1.0 / theta.alpha);
    const double shift = theta.beta * xi_h(theta.alpha, h);
    std::vector<double> out(path.n());
    for (int j = 1; j <= path.n(); ++j) {
        const double d = path.values[j] - path.values[j - 1] - (theta.mu - theta.lambda * path.values[j - 1]) * h;
        out[j - 1] = d / scale - shift;
    }
    return out;
}

std::vector<double> exact_residuals(const ModelParams& theta, const ObservedPath& path) {
    const TransitionLaw tr = transition(theta, path.scheme.h());
    std::vector<double> out(path.n());
    for (int j = 1; j <= path.n(); ++j)
        out[j - 1] = (path.values[j] - tr.decay * path.values[j - 1] - tr.drift_term - tr.mu_h) / tr.sigma_h;
    return out;
}

StableParams stationary_law(const ModelParams& theta) {
    theta.validate();
    require(theta.lambda > 0.0, "stationary_law: needs lambda > 0");
    const double a = theta.alpha;
    const double scale = theta.sigma * std::pow(1.0 / (theta.lambda * a), 1.0 / a);
    // Limit of mu_h as h -> infinity: h eta(lambda h) -> 1/lambda, h eta(lambda alpha h) -> 1/(lambda alpha).
    const double mu_inf = theta.beta * theta.sigma * (scale / theta.sigma - 1.0 / theta.lambda) * std::tan(a * std::numbers::pi / 2.0);
    return StableParams{a, theta.beta, scale, theta.mu / theta.lambda + mu_inf};
}

PathSummary path_summary(const ObservedPath& path) {
    path.validate();
    const auto& y = path.values;
    const int n = path.n();
    double s1 = 0.5 * (y[0] + y[n]);
    double s2 = 0.5 * (y[0] * y[0] + y[n] * y[n]);
    for (int j = 1; j < n; ++j) {
        s1 += y[j];
        s2 += y[j] * y[j];
    }
    return {s1 / n, s2 / n};
}

}  // namespace ssou
