#pragma once

/**
 * @file ou.hpp
 * @brief Skewed stable Ornstein-Uhlenbeck process dY = (mu - lambda Y) dt + sigma dJ.
 *
 * J is a stable Levy process with J_1 ~ S0(alpha, beta, 1, 0). Over a step of
 * length h the transition is exactly
 *
 *   Y_{t+h} = e^{-lambda h} Y_t + mu h eta(lambda h) + xi,
 *   xi ~ S0(alpha, beta, sigma_h, mu_h),
 *
 * with eta(x) = (1 - e^{-x}) / x, sigma_h = sigma (h eta(lambda alpha h))^{1/alpha} and
 * mu_h = beta sigma ((h eta(lambda alpha h))^{1/alpha} - h eta(lambda h)) tan(alpha pi / 2).
 * Every drift expression goes through eta so that lambda = 0 is regular.
 */

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ssou/jet.hpp"
#include "ssou/rng.hpp"
#include "ssou/stable.hpp"

namespace ssou {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

/// Coordinate order of every 5-vector in the library.
enum Param : int { kLambda = 0, kMu = 1, kAlpha = 2, kSigma = 3, kBeta = 4 };

/// Short names in coordinate order: lambda, mu, alpha, sigma, beta.
const char* param_name(int k);

struct ModelParams {
    double lambda = 1.0;  ///< mean-reversion rate, 1/time
    double mu = 2.0;      ///< drift level
    double alpha = 1.5;   ///< stability index
    double sigma = 5.0;   ///< noise scale, > 0
    double beta = 0.5;    ///< skewness

    Vec5 vec() const;
    static ModelParams from_vec(const Vec5& v);

    /// Finite values, sigma > 0, alpha in (0, 2), beta in [-1, 1].
    void validate() const;
    /// Estimation-grade region: alpha in (1, 2), beta in (-1, 1).
    bool in_estimation_region() const;
};

struct SamplingScheme {
    double T = 1.0;  ///< terminal time, > 0
    int n = 2000;    ///< number of steps, >= 1

    SamplingScheme() = default;
    SamplingScheme(double T_, int n_);

    double h() const { return T / n; }
    double lbar() const { return -std::log(h()); }
    void validate() const;
};

struct ObservedPath {
    std::vector<double> values;  ///< Y at t_0 .. t_n
    SamplingScheme scheme;

    double y0() const { return values.front(); }
    int n() const { return scheme.n; }
    /// Length n + 1 with finite entries.
    void validate() const;
};

struct TransitionLaw {
    double decay = 1.0;       ///< e^{-lambda h}
    double drift_term = 0.0;  ///< mu h eta(lambda h)
    double sigma_h = 1.0;
    double mu_h = 0.0;
};

/// (1 - e^{-x}) / x with the Taylor branch for |x| < 1e-4.
template <class T>
T eta(const T& x) {
    using std::expm1;
    using ad::expm1;
    if (std::abs(ad::value(x)) < 1e-4) {
        // sum_k (-x)^k / (k+1)!
        return 1.0 - x * (1.0 / 2.0 - x * (1.0 / 6.0 - x * (1.0 / 24.0 - x * (1.0 / 120.0 - x / 720.0))));
    }
    return -expm1(-x) / x;
}

/// tan(alpha pi / 2) * expm1((alpha - 1) y), finite through alpha = 1.
template <class T, class U>
T tan_expm1(const T& alpha, const U& y) {
    using std::cos;
    using std::expm1;
    using std::sin;
    using ad::cos;
    using ad::expm1;
    using ad::sin;
    const T eps = alpha - 1.0;
    const T z = (std::numbers::pi / 2.0) * eps;
    T zcot;
    if (std::abs(ad::value(z)) < 0.1) {
        const T z2 = z * z;
        zcot = 1.0 - z2 * (1.0 / 3.0 + z2 * (1.0 / 45.0 + z2 * (2.0 / 945.0 + z2 * (1.0 / 4725.0))));
    } else {
        zcot = z * cos(z) / sin(z);
    }
    const T x = eps * y;
    T B;
    if (std::abs(ad::value(x)) < 1e-3) {
        B = 1.0 + x * (1.0 / 2.0 + x * (1.0 / 6.0 + x * (1.0 / 24.0 + x * (1.0 / 120.0 + x / 720.0))));
    } else {
        B = expm1(x) / x;
    }
    return -(2.0 / std::numbers::pi) * y * zcot * B;
}

/// xi_h(alpha) = (1 - h^{1 - 1/alpha}) tan(alpha pi / 2).
template <class T>
T xi_h(const T& alpha, double h) {
    // 1 - h^{(alpha-1)/alpha} = -expm1((alpha - 1) log(h) / alpha)
    return -tan_expm1(alpha, std::log(h) / alpha);
}

/// xi_h and its first two alpha-derivatives.
struct XiTerms {
    double xi, d1, d2;
};
XiTerms xi_terms(double alpha, double h);

/// Transition law over one step; the scalar type may be a Jet for derivatives.
template <class T>
struct TransitionT {
    T decay, drift_term, sigma_h, mu_h;
};

template <class T>
TransitionT<T> transition_t(const T& lambda, const T& mu, const T& alpha, const T& sigma, const T& beta, double h) {
    using std::exp;
    using std::log;
    using ad::exp;
    using ad::log;
    TransitionT<T> out;
    out.decay = exp(-lambda * h);
    const T hl = h * eta(lambda * h);
    out.drift_term = mu * hl;
    const T ha = h * eta(lambda * alpha * h);
    const T log_ha = log(ha);
    out.sigma_h = sigma * exp(log_ha / alpha);
    // (ha^{1/alpha} - hl) t_alpha = hl t_alpha expm1(log(ha)/alpha - log(hl)); the exponent is
    // (alpha - 1) times y with y = (log(ha)/alpha - log(hl)) / (alpha - 1), which stays finite.
    const double eps = ad::value(alpha) - 1.0;
    if (std::abs(eps) > 1e-6) {
        const T y = (log_ha / alpha - log(hl)) / (alpha - 1.0);
        out.mu_h = beta * sigma * hl * tan_expm1(alpha, y);
    } else {
        // At alpha = 1 the exponent vanishes to first order; use the derivative in alpha.
        // d/dalpha [log(ha)/alpha - log(hl)] at alpha = 1 with ha depending on alpha.
        const double lv = ad::value(lambda);
        const double x = lv * h;
        // d log(eta(lambda alpha h)) / dalpha at alpha = 1 equals x eta'(x) / eta(x).
        const double e = std::abs(x) < 1e-4 ? 1.0 - x / 2.0 : -std::expm1(-x) / x;
        const double de = std::abs(x) < 1e-4 ? -0.5 + x / 3.0 : (std::exp(-x) * x - (1.0 - std::exp(-x))) / (x * x);
        const double y = -std::log(h * e) + x * de / e;
        out.mu_h = beta * sigma * hl * (-(2.0 / std::numbers::pi) * y);
    }
    return out;
}

TransitionLaw transition(const ModelParams& theta, double h);

/// Exact simulation: each step consumes exactly two uniforms from `rng`.
ObservedPath simulate_path(const ModelParams& theta, double y0, const SamplingScheme& scheme, RngStream& rng);

/// eps_j = (Delta_j Y - (mu - lambda Y_{j-1}) h) / (sigma h^{1/alpha}) - beta xi_h(alpha), j = 1..n.
std::vector<double> euler_residuals(const ModelParams& theta, const ObservedPath& path);

/// eps'_j = (Y_j - e^{-lambda h} Y_{j-1} - mu h eta(lambda h) - mu_h) / sigma_h, j = 1..n.
std::vector<double> exact_residuals(const ModelParams& theta, const ObservedPath& path);

/// Stationary law S0(alpha, beta, sigma (lambda alpha)^{-1/alpha}, mu/lambda + mu_inf); needs lambda > 0.
StableParams stationary_law(const ModelParams& theta);

/// Time averages T^{-1} int Y dt and T^{-1} int Y^2 dt by the trapezoid rule on the grid.
struct PathSummary {
    double ybar = 0.0;
    double y2bar = 0.0;
};
PathSummary path_summary(const ObservedPath& path);

}  // namespace ssou
