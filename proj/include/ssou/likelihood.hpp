#pragma once

/**
 * @file likelihood.hpp
 * @brief Exact log-likelihood and Euler quasi-log-likelihood of the stable OU model.
 *
 * Both objectives have the form sum_j [K(theta) + log phi_{alpha,beta}(e_j(theta))]
 * where phi is the standardized S0 density and e_j a standardized residual:
 *
 *  - quasi (Euler):  e_j = (Delta_j Y - (mu - lambda Y_{j-1}) h) / (sigma h^{1/alpha}) - beta xi_h(alpha),
 *                    K = -log sigma + lbar / alpha;
 *  - exact:          e_j = (Y_j - e^{-lambda h} Y_{j-1} - mu h eta(lambda h) - mu_h) / sigma_h,
 *                    K = -log sigma_h.
 *
 * Gradients are analytic: the quasi objective uses the closed-form residual
 * derivatives, the exact objective propagates second-order jets through the
 * transition law. Hessians default to central differences of the analytic
 * gradient; an analytic mode is available for both.
 */

#include <string>

#include "ssou/ou.hpp"
#include "ssou/stable.hpp"

namespace ssou {

/// Log-density partials at a residual x.
struct ScoreKernels {
    double psi = 0.0;        ///< d/dx log phi
    double f = 0.0;          ///< d/dalpha log phi
    double g = 0.0;          ///< d/dbeta log phi
    double psi_prime = 0.0;  ///< d/dx psi
    double f_prime = 0.0;    ///< d/dx f
    double g_prime = 0.0;    ///< d/dx g
};

/// @throws DomainError if the density is not positive at x.
ScoreKernels score_kernels(double alpha, double beta, double x);

enum class Objective { Quasi, Exact };
const char* to_string(Objective o);

enum class Derivatives { None, Gradient, Hessian };
enum class GradientMode { Analytic, FiniteDifference };
enum class HessianMode { FiniteDifference, Analytic };

struct ObjectiveOptions {
    GradientMode gradient = GradientMode::Analytic;
    HessianMode hessian = HessianMode::FiniteDifference;
};

/// Central-difference steps, scaled by max(1, |theta_k|).
inline constexpr double kGradientStep = 1e-5;
inline constexpr double kHessianStep = 1e-4;

struct ObjectiveEval {
    bool valid = true;    ///< false: theta outside the engine range or a non-finite value
    std::string reason;   ///< why the evaluation is invalid
    double value = 0.0;
    bool has_gradient = false;
    bool has_hessian = false;
    Vec5 gradient = Vec5::Zero();
    Mat5 hessian = Mat5::Zero();

    static ObjectiveEval invalid(std::string why);
};

/**
 * @brief Euler quasi-log-likelihood H_n.
 * @throws QuadratureError from the density engine.
 */
ObjectiveEval quasi_loglik(const ModelParams& theta, const ObservedPath& path, Derivatives derivs,
                           const ObjectiveOptions& options = {});

/**
 * @brief Exact log-likelihood l_n.
 * @throws QuadratureError from the density engine.
 */
ObjectiveEval exact_loglik(const ModelParams& theta, const ObservedPath& path, Derivatives derivs,
                           const ObjectiveOptions& options = {});

ObjectiveEval evaluate(Objective objective, const ModelParams& theta, const ObservedPath& path, Derivatives derivs,
                       const ObjectiveOptions& options = {});

/// Jet-propagated evaluation with analytic Hessian for either objective.
/// The quasi variant exists to cross-check the closed-form path.
ObjectiveEval generic_loglik(Objective objective, const ModelParams& theta, const ObservedPath& path,
                             Derivatives derivs);

/// True when theta is inside the density engine range used by the objectives.
bool in_engine_range(const ModelParams& theta);

}  // namespace ssou
