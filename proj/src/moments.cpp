#include "ssou/moments.hpp"

#include <cmath>
#include <functional>

#include "ssou/errors.hpp"

namespace ssou {

namespace {

struct Root {
    double x;
    bool clamped;
};

// Root of f(x) = target on [lo, hi] for monotone f, orientation read from the endpoints.
// Targets outside the attainable range are clamped to the nearer endpoint.
Root bisect(const std::function<double(double)>& f, double target, double lo, double hi, double tol, int max_iter) {
    const double flo = f(lo) - target;
    const double fhi = f(hi) - target;
    if (flo == 0.0) return {lo, false};
    if (fhi == 0.0) return {hi, false};
    if ((flo > 0.0) == (fhi > 0.0)) return {std::abs(flo) < std::abs(fhi) ? lo : hi, true};
    const bool increasing = fhi > 0.0;
    for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid) - target;
        if (fm == 0.0) return {mid, false};
        if ((fm > 0.0) == increasing)
            hi = mid;
        else
            lo = mid;
    }
    return {0.5 * (lo + hi), false};
}

}  // namespace

void MomentConfig::validate() const {
    require(alpha_lo > 0.0 && alpha_lo < alpha_hi && alpha_hi < 2.0, "moments: invalid alpha bracket");
    require(beta_lo >= -1.0 && beta_lo < beta_hi && beta_hi <= 1.0, "moments: invalid beta bracket");
    require(q > 0.0 && q < alpha_lo / 2.0, "moments: need 0 < q < alpha_lo / 2");
    require(root_tol > 0.0 && max_iter > 0, "moments: invalid root tolerance");
}

std::vector<double> second_diffs(const ObservedPath& path) {
    const auto& y = path.values;
    if (y.size() < 3) throw InsufficientData("second_diffs: need n >= 2");
    std::vector<double> out(y.size() - 2);
    for (std::size_t j = 2; j < y.size(); ++j) out[j - 2] = (y[j] - y[j - 1]) - (y[j - 1] - y[j - 2]);
    return out;
}

std::vector<double> centralized_diffs(const ObservedPath& path) {
    const auto& y = path.values;
    if (y.size() < 4) throw InsufficientData("centralized_diffs: need n >= 3");
    std::vector<double> out(y.size() - 3);
    for (std::size_t j = 3; j < y.size(); ++j) {
        const double d0 = y[j] - y[j - 1], d1 = y[j - 1] - y[j - 2], d2 = y[j - 2] - y[j - 3];
        out[j - 3] = d0 + d2 - 2.0 * d1;
    }
    return out;
}

double alpha_moment_ratio(double q, double alpha) {
    const double m1 = moment_m1(q, alpha);
    return m1 * m1 / moment_m1(2.0 * q, alpha);
}

double beta_moment_ratio(double q, double alpha, double beta, SkewAngleConvention convention) {
    const SkewMoments m = moment_m2(q, alpha, beta, convention);
    return m.signed_moment / m.abs_moment;
}

AlphaSigma estimate_alpha_sigma(const ObservedPath& path, const MomentConfig& config) {
    config.validate();
    if (path.n() < 3) throw InsufficientData("estimate_alpha_sigma: need n >= 3");
    const auto d2 = second_diffs(path);
    const double q = config.q;
    double sq = 0.0, s2q = 0.0;
    for (double v : d2) {
        const double a = std::pow(std::abs(v), q);
        sq += a;
        s2q += a * a;
    }
    const double m = static_cast<double>(d2.size());
    sq /= m;
    s2q /= m;
    AlphaSigma out;
    out.ratio = (s2q > 0.0) ? sq * sq / s2q : 1.0;
    const Root r = bisect([q](double a) { return alpha_moment_ratio(q, a); }, out.ratio, config.alpha_lo,
                          config.alpha_hi, config.root_tol, config.max_iter);
    out.alpha = r.x;
    out.clamped = r.clamped;
    const double h = path.scheme.h();
    // mean |D2 / (2h)^{1/alpha}|^q = (2h)^{-q/alpha} mean |D2|^q
    const double scaled = std::pow(2.0 * h, -q / out.alpha) * sq;
    out.sigma = std::pow(scaled / moment_m1(q, out.alpha), 1.0 / q);
    return out;
}

BetaFit estimate_beta(const ObservedPath& path, double alpha_hat, const MomentConfig& config) {
    config.validate();
    if (path.n() < 3) throw InsufficientData("estimate_beta: need n >= 3");
    require(alpha_hat > 1.0 && alpha_hat < 2.0, "estimate_beta: alpha_hat must lie in (1, 2)");
    const auto dc = centralized_diffs(path);
    const double q = config.q;
    double ssigned = 0.0, sabs = 0.0;
    for (double v : dc) {
        const double a = std::pow(std::abs(v), q);
        sabs += a;
        ssigned += (v > 0.0) ? a : (v < 0.0 ? -a : 0.0);
    }
    BetaFit out;
    out.ratio = sabs > 0.0 ? ssigned / sabs : 0.0;
    const auto conv = config.convention;
    const Root r = bisect([&](double b) { return beta_moment_ratio(q, alpha_hat, b, conv); }, out.ratio,
                          config.beta_lo, config.beta_hi, config.root_tol, config.max_iter);
    out.beta = r.x;
    out.clamped = r.clamped;
    return out;
}

MomentEstimate estimate_moments(const ObservedPath& path, const MomentConfig& config) {
    const AlphaSigma as = estimate_alpha_sigma(path, config);
    const BetaFit bf = estimate_beta(path, as.alpha, config);
    MomentEstimate m;
    m.alpha_hat = as.alpha;
    m.sigma_hat = as.sigma;
    m.beta_hat = bf.beta;
    m.alpha_ratio = as.ratio;
    m.beta_ratio = bf.ratio;
    m.alpha_clamped = as.clamped;
    m.beta_clamped = bf.clamped;
    return m;
}

}  // namespace ssou
