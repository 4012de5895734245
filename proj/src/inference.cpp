#include "ssou/inference.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ssou/density_kernel.hpp"
#include "ssou/errors.hpp"
#include "ssou/rng.hpp"

namespace ssou {

namespace {

constexpr double kEigenFloor = 1e-12;

double min_eig(const Mat5& m) {
    Eigen::SelfAdjointEigenSolver<Mat5> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace

double rate_rn(double alpha, const SamplingScheme& scheme) {
    return std::sqrt(static_cast<double>(scheme.n)) * std::pow(scheme.h(), 1.0 - 1.0 / alpha);
}

RateBlock rate_block(const ModelParams& theta, const SamplingScheme& scheme) {
    RateBlock b;
    b.p43 = -theta.sigma * scheme.lbar() / (theta.alpha * theta.alpha);
    b.p44 = theta.sigma;
    return b;
}

Mat5 rate_matrix(const ModelParams& theta, const SamplingScheme& scheme) {
    scheme.validate();
    require(scheme.h() < 1.0, "rate_matrix: needs h < 1");
    require(theta.alpha > 1.0 && theta.alpha < 2.0, "rate_matrix: alpha must lie in (1, 2)");
    const double rn = rate_rn(theta.alpha, scheme);
    const double c = 1.0 / (std::sqrt(static_cast<double>(scheme.n)) * xi_h(theta.alpha, scheme.h()));
    const RateBlock b = rate_block(theta, scheme);
    Mat5 p = Mat5::Zero();
    p(kLambda, kLambda) = 1.0 / rn;
    p(kMu, kMu) = 1.0 / rn;
    p(kAlpha, kAlpha) = c * b.p33;
    p(kAlpha, kSigma) = c * b.p34;
    p(kSigma, kAlpha) = c * b.p43;
    p(kSigma, kSigma) = c * b.p44;
    p(kBeta, kBeta) = c;
    return p;
}

Mat5 diagonal_rate_matrix(const ModelParams& theta, const SamplingScheme& scheme) {
    const Mat5 p = rate_matrix(theta, scheme);
    return p.diagonal().asDiagonal();
}

InformationReport normalized_information(const Mat5& hessian, const Mat5& rate) {
    InformationReport r;
    const Mat5 m = -rate.transpose() * hessian * rate;
    r.info = 0.5 * (m + m.transpose());
    r.min_eigenvalue = min_eig(r.info);
    return r;
}

InformationReport observed_information(Objective objective, const ModelParams& theta, const ObservedPath& path,
                                       const ObjectiveOptions& options) {
    const ObjectiveEval ev = evaluate(objective, theta, path, Derivatives::Hessian, options);
    if (!ev.valid) throw InvalidInput("observed_information: objective invalid at theta: " + ev.reason);
    return normalized_information(ev.hessian, rate_matrix(theta, path.scheme));
}

Mat5 sqrt_spd(const Mat5& m) {
    Eigen::SelfAdjointEigenSolver<Mat5> es(0.5 * (m + m.transpose()));
    const Vec5 ev = es.eigenvalues().cwiseMax(kEigenFloor).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Vec5 studentize(const Vec5& theta_hat, const Vec5& theta0, const Mat5& info, const Mat5& rate) {
    if (!(min_eig(info) > 0.0)) throw NotPositiveDefinite("studentize: information is not positive definite");
    return sqrt_spd(info) * rate.fullPivLu().solve(theta_hat - theta0);
}

Vec5 standard_errors(const Mat5& info, const Mat5& rate) {
    if (!(min_eig(info) > 0.0)) throw NotPositiveDefinite("standard_errors: information is not positive definite");
    const Mat5 cov = rate * info.inverse() * rate.transpose();
    return cov.diagonal().cwiseMax(0.0).cwiseSqrt();
}

Vec5 normalize_estimates(const Vec5& theta_hat, const Vec5& theta0, const SamplingScheme& scheme) {
    const double sn = std::sqrt(static_cast<double>(scheme.n));
    const double rn = rate_rn(theta0[kAlpha], scheme);
    const Vec5 d = theta_hat - theta0;
    Vec5 out;
    out << rn * d[kLambda], rn * d[kMu], sn * d[kAlpha], sn / scheme.lbar() * d[kSigma], sn * d[kBeta];
    return out;
}

LimitInformation limit_information_mc(const ModelParams& theta, const PathSummary& summary, std::size_t draws,
                                      std::uint64_t seed) {
    require(theta.in_estimation_region(), "limit_information_mc: theta outside the estimation region");
    require(draws >= 2, "limit_information_mc: need at least two draws");
    constexpr std::size_t kBlock = 1 << 15;
    const std::size_t nblocks = (draws + kBlock - 1) / kBlock;
    const double a = theta.alpha, b = theta.beta, sg = theta.sigma;
    const double t = std::tan(a * std::numbers::pi / 2.0);
    const double tp = (std::numbers::pi / 2.0) * (1.0 + t * t);
    const auto kernel = density_kernel(a, b);
    const StableParams law{a, b, 1.0, 0.0};

    using Mat4 = Eigen::Matrix<double, 4, 4>;
    std::vector<Mat4> sum(nblocks, Mat4::Zero()), sumsq(nblocks, Mat4::Zero());
    const long long nb = static_cast<long long>(nblocks);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long blk = 0; blk < nb; ++blk) {
        RngStream rng = RngStream::substream(seed, static_cast<std::uint64_t>(blk));
        const std::size_t lo = static_cast<std::size_t>(blk) * kBlock;
        const std::size_t hi = std::min(draws, lo + kBlock);
        Mat4 s = Mat4::Zero(), s2 = Mat4::Zero();
        for (std::size_t i = lo; i < hi; ++i) {
            const double e = sample_one(law, rng);
            const DensityEval d = kernel->eval(e, DensityOrder::First);
            const double psi = d.d_x / d.value, f = d.d_alpha / d.value, g = d.d_beta / d.value;
            Eigen::Vector4d v;
            v << psi / sg, (f - b * tp * psi) / t, -(1.0 + (e + b * t) * psi) / t, (g - t * psi) / t;
            const Mat4 o = v * v.transpose();
            s += o;
            s2 += o.cwiseProduct(o);
        }
        sum[blk] = s;
        sumsq[blk] = s2;
    }
    Mat4 M = Mat4::Zero(), M2 = Mat4::Zero();
    for (std::size_t k = 0; k < nblocks; ++k) {
        M += sum[k];
        M2 += sumsq[k];
    }
    const double N = static_cast<double>(draws);
    M /= N;
    const Mat4 var = (M2 / N - M.cwiseProduct(M)) * (N / (N - 1.0));
    const Mat4 se = (var.cwiseMax(0.0) / N).cwiseSqrt();

    // Entry (k, l) of the 5x5 matrix is c_k c_l M(i_k, i_l) with Y moments on the lambda row.
    LimitInformation out;
    const int src[5] = {0, 0, 1, 2, 3};
    for (int k = 0; k < 5; ++k)
        for (int l = 0; l < 5; ++l) {
            double factor = 1.0;
            if (k == kLambda && l == kLambda)
                factor = summary.y2bar;
            else if (k == kLambda || l == kLambda)
                factor = (k == kMu || l == kMu) ? -summary.ybar : summary.ybar;
            else if (k == kMu && l == kMu)
                factor = 1.0;
            else if (k == kMu || l == kMu)
                factor = -1.0;
            out.info(k, l) = factor * M(src[k], src[l]);
            out.std_error(k, l) = std::abs(factor) * se(src[k], src[l]);
        }
    out.min_eigenvalue = min_eig(out.info);
    return out;
}

}  // namespace ssou
