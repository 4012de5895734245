#pragma once

/**
 * @file optimize.hpp
 * @brief Box-constrained BFGS maximization of the likelihood objectives.
 *
 * Iterates live in rescaled coordinates v with theta = theta_start + P v, where
 * P is the rate matrix at the start point. In those coordinates the curvature
 * of the log-likelihood is of order one in every direction, so the identity is
 * a sensible initial inverse Hessian. Trial points are projected onto the box.
 */

#include <functional>
#include <string>

#include "ssou/likelihood.hpp"
#include "ssou/ou.hpp"

namespace ssou {

struct Bounds {
    Vec5 lo;
    Vec5 hi;

    /// lambda in [-100, 100], mu in [-1000, 1000], alpha in [1.005, 1.995],
    /// sigma in [0.005, 1e6], beta in [-0.995, 0.995].
    static Bounds defaults();
    bool contains(const Vec5& x) const;
    Vec5 project(const Vec5& x) const;
};

struct OptimizerConfig {
    Bounds bounds = Bounds::defaults();
    double grad_tol = 1e-6;     ///< sup-norm of the rate-normalized gradient
    double step_tol = 1e-8;     ///< sup-norm of the step in rescaled coordinates
    double accept_grad = 1e-3;  ///< a step_tol stop counts as converged below this gradient
    int max_iters = 500;
    double armijo = 1e-4;
    int max_backtracks = 60;
    double max_step = 10.0;  ///< cap on the rescaled step length (sup-norm)
};

struct OptResult {
    Vec5 theta = Vec5::Zero();
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    std::string reason;
    double grad_norm = 0.0;  ///< rate-normalized sup-norm at theta
};

/// Objective with gradient at theta; invalid results shrink the step.
using ObjectiveFn = std::function<ObjectiveEval(const Vec5&)>;
/// Normalizing matrix at theta; the identity when empty.
using RateFn = std::function<Mat5(const Vec5&)>;

/**
 * @brief Maximizes f over the box.
 * @throws InvalidInput if start is outside the box or f is invalid there.
 * @throws NoAscentError if the first line search fails to increase f.
 */
OptResult maximize(const ObjectiveFn& f, const Vec5& start, const OptimizerConfig& config = {},
                   const RateFn& rate = {});

}  // namespace ssou
