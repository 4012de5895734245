#pragma once

/**
 * @file moments.hpp
 * @brief Moment estimators of (alpha, sigma, beta) from differenced observations.
 *
 * Second differences Delta^2_j Y = Delta_j Y - Delta_{j-1} Y cancel the skewness
 * and most of the drift, leaving approximately symmetric stable variables of
 * scale sigma (2h)^{1/alpha}. The ratio (mean |x|^q)^2 / mean |x|^{2q} depends on
 * alpha alone and is inverted by bisection; sigma follows by plug-in.
 *
 * Centralized differences Delta^C_j Y = Delta_j Y + Delta_{j-2} Y - 2 Delta_{j-1} Y
 * keep a skewed but strictly stable law F_{alpha,beta}. The ratio of signed to
 * absolute q-th moments identifies beta once alpha is known.
 */

#include <vector>

#include "ssou/ou.hpp"
#include "ssou/stable.hpp"

namespace ssou {

struct MomentConfig {
    double q = 0.2;
    double alpha_lo = 1.001;
    double alpha_hi = 1.999;
    double beta_lo = -0.999;
    double beta_hi = 0.999;
    double root_tol = 1e-10;
    int max_iter = 200;
    SkewAngleConvention convention = kSkewAngleConvention;

    /// Throws InvalidInput unless 0 < q < alpha_lo / 2 and the brackets are ordered.
    void validate() const;
};

struct MomentEstimate {
    double alpha_hat = 0.0;
    double sigma_hat = 0.0;
    double beta_hat = 0.0;
    double alpha_ratio = 0.0;  ///< empirical (mean |D2|^q)^2 / mean |D2|^{2q}
    double beta_ratio = 0.0;   ///< empirical sum sgn|DC|^q / sum |DC|^q
    bool alpha_clamped = false;
    bool beta_clamped = false;
};

/// Delta^2_j Y for j = 2..n, length n - 1.
std::vector<double> second_diffs(const ObservedPath& path);

/// Delta^C_j Y for j = 3..n, length n - 2.
std::vector<double> centralized_diffs(const ObservedPath& path);

/// m_{1,q}(alpha)^2 / m_{1,2q}(alpha).
double alpha_moment_ratio(double q, double alpha);

/// Signed-to-absolute moment ratio of F_{alpha,beta}.
double beta_moment_ratio(double q, double alpha, double beta, SkewAngleConvention convention = kSkewAngleConvention);

struct AlphaSigma {
    double alpha = 0.0;
    double sigma = 0.0;
    double ratio = 0.0;
    bool clamped = false;
};

/// @throws InsufficientData when n < 3.
AlphaSigma estimate_alpha_sigma(const ObservedPath& path, const MomentConfig& config = {});

struct BetaFit {
    double beta = 0.0;
    double ratio = 0.0;
    bool clamped = false;
};

/// @throws InsufficientData when n < 3.
BetaFit estimate_beta(const ObservedPath& path, double alpha_hat, const MomentConfig& config = {});

/// Both steps.
MomentEstimate estimate_moments(const ObservedPath& path, const MomentConfig& config = {});

}  // namespace ssou
