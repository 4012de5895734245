#pragma once

/**
 * @file inference.hpp
 * @brief Rate matrix, observed information and Studentized statistics.
 *
 * The rate matrix is
 *
 *   phi_n = diag(r_n^{-1}, r_n^{-1}, (sqrt(n) xi_h(alpha))^{-1} Phi~),
 *   r_n = sqrt(n) h^{1 - 1/alpha},
 *   Phi~ = [[1, 0, 0], [-sigma lbar / alpha^2, sigma, 0], [0, 0, 1]]   on (alpha, sigma, beta).
 *
 * The off-diagonal entry cancels the lbar growth shared by the alpha and sigma
 * scores: with it the normalized information has a non-degenerate limit.
 */

#include <cstdint>

#include "ssou/likelihood.hpp"
#include "ssou/ou.hpp"

namespace ssou {

/// The entries of the (alpha, sigma) block before the common factor.
struct RateBlock {
    double p33 = 1.0, p34 = 0.0, p43 = 0.0, p44 = 1.0;
};

RateBlock rate_block(const ModelParams& theta, const SamplingScheme& scheme);

/// r_n = sqrt(n) h^{1 - 1/alpha}.
double rate_rn(double alpha, const SamplingScheme& scheme);

/// @throws InvalidInput unless h < 1 and alpha in (1, 2).
Mat5 rate_matrix(const ModelParams& theta, const SamplingScheme& scheme);

/// Diagonal part of rate_matrix, for the degeneracy comparison.
Mat5 diagonal_rate_matrix(const ModelParams& theta, const SamplingScheme& scheme);

struct InformationReport {
    Mat5 info = Mat5::Zero();  ///< -phi^T H phi, symmetrized
    double min_eigenvalue = 0.0;
};

/// -phi^T hessian phi, symmetrized.
InformationReport normalized_information(const Mat5& hessian, const Mat5& rate);

/**
 * @brief Observed information of an objective at theta.
 * @throws InvalidInput if the objective is invalid at theta.
 */
InformationReport observed_information(Objective objective, const ModelParams& theta, const ObservedPath& path,
                                       const ObjectiveOptions& options = {});

/// Symmetric square root with eigenvalues floored at 1e-12.
Mat5 sqrt_spd(const Mat5& m);

/**
 * @brief I^{1/2} phi^{-1} (theta_hat - theta0).
 * @throws NotPositiveDefinite if info has a non-positive eigenvalue.
 */
Vec5 studentize(const Vec5& theta_hat, const Vec5& theta0, const Mat5& info, const Mat5& rate);

/// Standard errors: sqrt(diag(phi I^{-1} phi^T)).
/// @throws NotPositiveDefinite if info has a non-positive eigenvalue.
Vec5 standard_errors(const Mat5& info, const Mat5& rate);

/// sqrt(n) h^{1-1/alpha} (lambda, mu errors), sqrt(n) (alpha), sqrt(n)/lbar (sigma), sqrt(n) (beta).
Vec5 normalize_estimates(const Vec5& theta_hat, const Vec5& theta0, const SamplingScheme& scheme);

struct LimitInformation {
    Mat5 info = Mat5::Zero();
    Mat5 std_error = Mat5::Zero();  ///< Monte Carlo standard error of each entry
    double min_eigenvalue = 0.0;
};

/**
 * @brief Monte Carlo estimate of the limit of the normalized information.
 *
 * With eps ~ S0(alpha, beta, 1, 0), t = tan(alpha pi / 2) and t' its alpha derivative,
 * the normalized one-step score is
 *   (psi Y / sigma, -psi / sigma, (f - beta t' psi) / t, -(1 + (eps + beta t) psi) / t, (g - t psi) / t)
 * and the limit is its second-moment matrix with Y and Y^2 replaced by the
 * path time averages.
 */
LimitInformation limit_information_mc(const ModelParams& theta, const PathSummary& summary, std::size_t draws,
                                      std::uint64_t seed);

}  // namespace ssou
