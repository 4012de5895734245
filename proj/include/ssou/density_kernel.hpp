#pragma once

// Fixed-node evaluation of the standardized stable density for many x at one
// (alpha, beta). The likelihoods call this thousands of times per fit, so the
// per-node parts of the inversion integrand that do not depend on x are
// computed once per shape and reused.
//
// Layout of the frequency axis at level j (panel width H = 4 * 2^-j):
//   [0, H/16]        power-series moments of the integrand
//   [H/16, H]        four geometric panels, 12-point Gauss-Legendre
//   [H, U]           uniform panels of width H, 16-point Gauss-Legendre
// Level j serves |x| + w <= 8 / H where w bounds the integrand's own
// frequency content. Large |x + beta t_alpha| goes to the tail expansion.

#include <array>
#include <atomic>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <vector>

#include "ssou/stable.hpp"

namespace ssou {

class DensityKernel {
public:
    DensityKernel(double alpha, double beta);
    ~DensityKernel();
    DensityKernel(const DensityKernel&) = delete;
    DensityKernel& operator=(const DensityKernel&) = delete;

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }

    /// Density partials up to `order` at x. Thread-safe.
    /// @throws QuadratureError when x needs more than the finest level.
    DensityEval eval(double x, DensityOrder order) const;

    /// Batched evaluation, OpenMP parallel over x.
    void eval_batch(const double* x, std::size_t n, DensityOrder order, DensityEval* out) const;

    /// Serial reference for eval_batch; identical results.
    void eval_batch_serial(const double* x, std::size_t n, DensityOrder order, DensityEval* out) const;

    /// Level used for x (exposed for tests).
    int level_for(double x) const;

    static constexpr int kMaxLevel = 16;

private:
    struct Level;
    const Level& level(int j, DensityOrder order) const;
    DensityEval quadrature(double x, DensityOrder order) const;
    std::unique_ptr<Level> build_level(int j, int nch) const;

    double alpha_;
    double beta_;
    detail::Shape shape_;
    double cutoff_;
    double w_;  // frequency bound of the integrand envelope and phase
    bool tail_ok_;

    mutable std::mutex mutex_;
    mutable std::array<std::array<std::atomic<Level*>, kMaxLevel + 1>, 3> levels_{};
    mutable std::vector<std::unique_ptr<Level>> storage_;
};

/// Per-thread memo of kernels keyed by the exact (alpha, beta) bits.
std::shared_ptr<const DensityKernel> density_kernel(double alpha, double beta);

}  // namespace ssou
