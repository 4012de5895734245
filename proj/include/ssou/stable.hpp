#pragma once

/**
 * @file stable.hpp
 * @brief Skewed alpha-stable laws in the S0 (Nolan) parametrization.
 *
 * The S0 law with parameters (alpha, beta, sigma, mu) has characteristic
 * function
 *
 *   exp{ i mu u - (sigma|u|)^alpha (1 + i beta sgn(u) t_alpha (|sigma u|^(1-alpha) - 1)) }
 *
 * with t_alpha = tan(alpha pi / 2), and the logarithmic form at alpha = 1.
 * It is continuous in alpha. Densities are computed by Fourier inversion of the
 * standardized law S0(alpha, beta, 1, 0), together with their partials in
 * (x, alpha, beta).
 */

#include <complex>
#include <cstddef>
#include <vector>

#include "ssou/rng.hpp"

namespace ssou {

struct StableParams {
    double alpha = 1.5;  ///< stability index in (0, 2)
    double beta = 0.0;   ///< skewness in [-1, 1]
    double sigma = 1.0;  ///< scale, > 0
    double mu = 0.0;     ///< S0 location

    /// Throws InvalidInput unless the invariants hold.
    void validate() const;
};

/// Standardized density phi_{alpha,beta}(x) and partials.
struct DensityEval {
    double value = 0.0;
    double d_x = 0.0;
    double d_alpha = 0.0;
    double d_beta = 0.0;
    double d_xx = 0.0;
    double d_xalpha = 0.0;
    double d_xbeta = 0.0;
    double d_alphaalpha = 0.0;
    double d_alphabeta = 0.0;
    double d_betabeta = 0.0;
};

/// How many partials to compute: value only, first order, or second order.
enum class DensityOrder { Value = 0, First = 1, Second = 2 };

std::complex<double> char_fn(const StableParams& params, double u);

/**
 * @brief Density of S0(alpha, beta, 1, 0) at x with partials up to `order`.
 *
 * Uses the tail expansion when it converges and adaptive Gauss-Kronrod
 * quadrature of the inversion integral otherwise.
 * Engine range: alpha in (0.5, 2), beta in (-1, 1).
 * @throws QuadratureError if the panel budget is exhausted.
 */
DensityEval pdf(double alpha, double beta, double x, DensityOrder order = DensityOrder::First);

/// One CMS draw from S0(alpha, beta, sigma, mu). Consumes exactly two uniforms.
double sample_one(const StableParams& params, RngStream& rng);

std::vector<double> sample(const StableParams& params, std::size_t count, RngStream& rng);

/// E|Z|^q for Z ~ S0(alpha, 0, 1, 0). Requires 0 < q < min(1, alpha).
double moment_m1(double q, double alpha);

/// Reading of the skew angle inside the moment formulas for F_{alpha,beta}.
/// The angle is eta = atan(beta_eff t_alpha) and the trigonometric factors
/// use q*eta*k with k = 1/2, 1 or 1/alpha.
enum class SkewAngleConvention { Halved, Unhalved, OverAlpha };

/// The convention that matched the Monte Carlo construction oracle.
inline constexpr SkewAngleConvention kSkewAngleConvention = SkewAngleConvention::OverAlpha;

const char* to_string(SkewAngleConvention c);

struct SkewMoments {
    double abs_moment = 0.0;     ///< E|X|^q
    double signed_moment = 0.0;  ///< E[sgn(X)|X|^q]
};

/// ((2 - 2^alpha) / (2 + 2^alpha)) * beta, the skewness of centralized differences.
double effective_beta(double alpha, double beta);

/// Moments of F_{alpha,beta} = S0(beta_eff, 1, beta_eff t_alpha).
/// Requires 0 < q < alpha / 2.
SkewMoments moment_m2(double q, double alpha, double beta,
                      SkewAngleConvention convention = kSkewAngleConvention);

namespace detail {

/// Upper limit of the inversion integral: exp(-U^alpha) is about 1e-17.
double inversion_cutoff(double alpha);

/// Shape constants for the exponent of the standardized characteristic function.
/// With eps = alpha - 1 and L = log u the imaginary part is beta * u * G(eps, L)
/// where G = t_alpha * expm1(eps L) = -L * A(eps) * B(eps L).
struct Shape {
    double alpha = 0.0;
    double beta = 0.0;
    double eps = 0.0;
    double t = 0.0;   // tan(alpha pi / 2); infinite at alpha = 1, unused there
    double A = 0.0;   // (2/pi) z cot z with z = pi eps / 2
    double A1 = 0.0;  // dA / dalpha
    double A2 = 0.0;  // d2A / dalpha2
};

Shape make_shape(double alpha, double beta);

/// G and its first two alpha-derivatives at u > 0.
void g_terms(const Shape& s, double u, double& G, double& G1, double& G2);

/// Number of complex channels for an order: 1, 4 or 10.
int channel_count(DensityOrder order);

/**
 * Integrand factors at frequency u > 0: out[c] = exp(E(u)) * F_c(u) where
 * E is the log characteristic function. Channel order: value, x, alpha, beta,
 * xx, xalpha, xbeta, alphaalpha, alphabeta, betabeta. The density partial for
 * channel c is (1/pi) * integral of Re[out[c] * exp(-i x u)] du.
 */
void channel_factors(const Shape& s, double u, int nch, std::complex<double>* out);

/// Tail expansion. Returns false when the series does not converge to the
/// requested accuracy at this x; `out` is untouched in that case.
bool tail_density(double alpha, double beta, double x, DensityOrder order, DensityEval& out);

/// Shifted argument x + beta * t_alpha used by the tail expansion.
double tail_argument(double alpha, double beta, double x);

/// |x + beta t_alpha| above which the tail expansion is attempted.
inline constexpr double kTailThreshold = 10.0;

/// Adaptive Gauss-Kronrod inversion (no tail expansion).
DensityEval pdf_adaptive(double alpha, double beta, double x, DensityOrder order);

}  // namespace detail

}  // namespace ssou
