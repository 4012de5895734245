#pragma once

/**
 * @file pipeline.hpp
 * @brief End-to-end estimators: moments, Euler QMLE, exact MLE and the time-scale variant.
 *
 * The likelihood estimators start from the moment estimates of (alpha, sigma, beta)
 * and a fixed (lambda, mu) guess, maximize the objective with BFGS and then
 * evaluate the observed information at the maximizer.
 */

#include <limits>
#include <string>

#include "ssou/inference.hpp"
#include "ssou/likelihood.hpp"
#include "ssou/moments.hpp"
#include "ssou/optimize.hpp"

namespace ssou {

enum class Method { Moment, Qmle, Mle, Timescale };

const char* to_string(Method m);
/// Accepts moment, qmle, mle, timescale. @throws InvalidInput otherwise.
Method parse_method(const std::string& s);

struct EstimateOptions {
    MomentConfig moments;
    OptimizerConfig optimizer;
    ObjectiveOptions objective;
    double lambda0 = 2.0;
    double mu0 = 3.0;
    bool information = true;       ///< compute the observed information at the estimate
    bool timescale_refine = true;  ///< joint refinement after the stepwise time-scale fit
};

struct EstimationResult {
    Method method = Method::Qmle;
    Vec5 theta_hat = Vec5::Constant(std::numeric_limits<double>::quiet_NaN());
    MomentEstimate moments;
    double loglik = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    int iterations = 0;
    int evaluations = 0;
    std::string reason;
    double grad_norm = std::numeric_limits<double>::quiet_NaN();
    bool has_info = false;
    Mat5 info = Mat5::Zero();
    Mat5 rate = Mat5::Identity();
    double info_min_eig = std::numeric_limits<double>::quiet_NaN();
    Vec5 std_err = Vec5::Constant(std::numeric_limits<double>::quiet_NaN());
    double runtime_s = 0.0;
    /// Time-scale fits only: tau-hat, the stepwise estimate and the back-transformed
    /// (lambda, mu, alpha, tau^{1/alpha}, beta).
    double tau = std::numeric_limits<double>::quiet_NaN();
    Vec5 stepwise = Vec5::Constant(std::numeric_limits<double>::quiet_NaN());
    Vec5 original = Vec5::Constant(std::numeric_limits<double>::quiet_NaN());
};

/**
 * @brief Runs one estimator on a path.
 *
 * Optimizer breakdowns are reported through converged = false and reason;
 * the estimate is whatever the optimizer reached.
 * @throws InvalidInput, InsufficientData, QuadratureError.
 */
EstimationResult estimate(const ObservedPath& path, Method method, const EstimateOptions& options = {});

/// Time-scale reparametrization with sigma fixed to one:
/// (lambda tau, mu tau + beta (tau^{1/alpha} - tau) t_alpha, alpha, tau^{1/alpha}, beta).
struct TimeScaleParams {
    double lambda = 1.0;
    double mu = 0.0;
    double alpha = 1.5;
    double tau = 1.0;
    double beta = 0.0;
};

ModelParams to_time_scaled(const TimeScaleParams& p);
TimeScaleParams from_time_scaled(const ModelParams& tilde);

}  // namespace ssou
