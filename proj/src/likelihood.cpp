#include "ssou/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ssou/density_kernel.hpp"
#include "ssou/errors.hpp"

namespace ssou {

namespace {

using Jet5 = ad::Jet<5>;

DensityOrder order_for(Derivatives d, bool analytic_hessian) {
    if (d == Derivatives::None) return DensityOrder::Value;
    if (d == Derivatives::Hessian && analytic_hessian) return DensityOrder::Second;
    return DensityOrder::First;
}

// Log-density partials from density partials.
struct LogPartials {
    double l, x, a, b, xx, xa, xb, aa, ab, bb;
};

bool log_partials(const DensityEval& e, DensityOrder order, LogPartials& p) {
    if (!(e.value > 0.0) || !std::isfinite(e.value)) return false;
    const double r = 1.0 / e.value;
    p.l = std::log(e.value);
    if (order == DensityOrder::Value) return true;
    p.x = e.d_x * r;
    p.a = e.d_alpha * r;
    p.b = e.d_beta * r;
    if (order == DensityOrder::First) return true;
    p.xx = e.d_xx * r - p.x * p.x;
    p.xa = e.d_xalpha * r - p.x * p.a;
    p.xb = e.d_xbeta * r - p.x * p.b;
    p.aa = e.d_alphaalpha * r - p.a * p.a;
    p.ab = e.d_alphabeta * r - p.a * p.b;
    p.bb = e.d_betabeta * r - p.b * p.b;
    return true;
}

std::vector<DensityEval> densities(double alpha, double beta, const std::vector<double>& x, DensityOrder order) {
    const auto kernel = density_kernel(alpha, beta);
    std::vector<DensityEval> out(x.size());
    kernel->eval_batch(x.data(), x.size(), order, out.data());
    return out;
}

ObjectiveEval finalize(ObjectiveEval ev) {
    if (!std::isfinite(ev.value)) return ObjectiveEval::invalid("non-finite objective value");
    if (ev.has_gradient && !ev.gradient.allFinite()) return ObjectiveEval::invalid("non-finite gradient");
    if (ev.has_hessian && !ev.hessian.allFinite()) return ObjectiveEval::invalid("non-finite hessian");
    return ev;
}

// Closed-form quasi-likelihood. Residual derivatives with r = eps + beta xi = D / s:
//   eps_lambda = Y h / s, eps_mu = -h / s, eps_alpha = -r lbar / alpha^2 - beta xi',
//   eps_sigma = -r / sigma, eps_beta = -xi.
ObjectiveEval quasi_closed_form(const ModelParams& th, const ObservedPath& path, Derivatives derivs,
                                bool analytic_hessian) {
    const double h = path.scheme.h();
    const double lbar = path.scheme.lbar();
    const int n = path.n();
    const double a = th.alpha, sg = th.sigma, b = th.beta;
    const XiTerms xi = xi_terms(a, h);
    const double s = sg * std::pow(h, 1.0 / a);
    const double c = h / s;
    const double la2 = lbar / (a * a);

    std::vector<double> eps(n);
    const auto& y = path.values;
    for (int j = 1; j <= n; ++j) eps[j - 1] = (y[j] - y[j - 1] - (th.mu - th.lambda * y[j - 1]) * h) / s - b * xi.xi;

    const DensityOrder order = order_for(derivs, analytic_hessian);
    const auto dens = densities(a, b, eps, order);

    ObjectiveEval ev;
    ev.value = n * (-std::log(sg) + lbar / a);
    const bool want_grad = derivs != Derivatives::None;
    const bool want_hess = derivs == Derivatives::Hessian && analytic_hessian;
    Vec5 g = Vec5::Zero();
    Mat5 H = Mat5::Zero();
    LogPartials p{};
    for (int j = 0; j < n; ++j) {
        if (!log_partials(dens[j], order, p)) return ObjectiveEval::invalid("density not positive at a residual");
        ev.value += p.l;
        if (!want_grad) continue;
        const double ylag = y[j];
        const double r = eps[j] + b * xi.xi;
        Vec5 e1;
        e1 << ylag * c, -c, -r * la2 - b * xi.d1, -r / sg, -xi.xi;
        g += p.x * e1;
        g[kAlpha] += p.a;
        g[kBeta] += p.b;
        if (!want_hess) continue;
        // Second residual derivatives; the lambda and mu rows scale like 1/s.
        Mat5 e2 = Mat5::Zero();
        e2(kLambda, kAlpha) = -e1[kLambda] * la2;
        e2(kLambda, kSigma) = -e1[kLambda] / sg;
        e2(kMu, kAlpha) = -e1[kMu] * la2;
        e2(kMu, kSigma) = -e1[kMu] / sg;
        e2(kAlpha, kAlpha) = r * (la2 * la2 + 2.0 * lbar / (a * a * a)) - b * xi.d2;
        e2(kAlpha, kSigma) = r * la2 / sg;
        e2(kAlpha, kBeta) = -xi.d1;
        e2(kSigma, kSigma) = 2.0 * r / (sg * sg);
        for (int k = 0; k < 5; ++k)
            for (int l = 0; l < k; ++l) e2(k, l) = e2(l, k);
        H += p.xx * e1 * e1.transpose() + p.x * e2;
        for (int k = 0; k < 5; ++k) {
            H(k, kAlpha) += p.xa * e1[k];
            H(kAlpha, k) += p.xa * e1[k];
            H(k, kBeta) += p.xb * e1[k];
            H(kBeta, k) += p.xb * e1[k];
        }
        H(kAlpha, kAlpha) += p.aa;
        H(kAlpha, kBeta) += p.ab;
        H(kBeta, kAlpha) += p.ab;
        H(kBeta, kBeta) += p.bb;
    }
    if (want_grad) {
        g[kSigma] -= n / sg;
        g[kAlpha] -= n * la2;
        ev.gradient = g;
        ev.has_gradient = true;
    }
    if (want_hess) {
        H(kSigma, kSigma) += n / (sg * sg);
        H(kAlpha, kAlpha) += 2.0 * n * lbar / (a * a * a);
        ev.hessian = H;
        ev.has_hessian = true;
    }
    return finalize(ev);
}

// Per-step affine structure shared by both objectives:
//   e_j = (Y_j - A Y_{j-1} - B) / S - C,   objective = sum_j [K + log phi(e_j)].
struct Affine {
    Jet5 A, B, S, C, K;
};

Affine affine_terms(Objective obj, const ModelParams& th, const SamplingScheme& sc) {
    const Jet5 lam = Jet5::variable(th.lambda, kLambda);
    const Jet5 mu = Jet5::variable(th.mu, kMu);
    const Jet5 al = Jet5::variable(th.alpha, kAlpha);
    const Jet5 sg = Jet5::variable(th.sigma, kSigma);
    const Jet5 be = Jet5::variable(th.beta, kBeta);
    const double h = sc.h();
    Affine t;
    if (obj == Objective::Quasi) {
        t.A = 1.0 - lam * h;
        t.B = mu * h;
        t.S = sg * ad::exp(std::log(h) / al);
        t.C = be * xi_h(al, h);
        t.K = -ad::log(sg) + sc.lbar() / al;
    } else {
        const auto tr = transition_t(lam, mu, al, sg, be, h);
        t.A = tr.decay;
        t.B = tr.drift_term + tr.mu_h;
        t.S = tr.sigma_h;
        t.C = Jet5(0.0);
        t.K = -ad::log(tr.sigma_h);
    }
    return t;
}

ObjectiveEval jet_loglik(Objective obj, const ModelParams& th, const ObservedPath& path, Derivatives derivs,
                         bool analytic_hessian) {
    const Affine t = affine_terms(obj, th, path.scheme);
    const int n = path.n();
    const auto& y = path.values;
    const DensityOrder order = order_for(derivs, analytic_hessian);
    const bool want_grad = derivs != Derivatives::None;
    const bool want_hess = derivs == Derivatives::Hessian && analytic_hessian;

    const Jet5 invS = 1.0 / t.S;
    std::vector<double> eps(n);
    for (int j = 1; j <= n; ++j) eps[j - 1] = (y[j] - t.A.v * y[j - 1] - t.B.v) * invS.v - t.C.v;
    const auto dens = densities(th.alpha, th.beta, eps, order);

    ObjectiveEval ev;
    ev.value = n * t.K.v;
    Vec5 g = Vec5::Zero();
    Mat5 H = Mat5::Zero();
    LogPartials p{};
    for (int j = 0; j < n; ++j) {
        if (!log_partials(dens[j], order, p)) return ObjectiveEval::invalid("density not positive at a residual");
        ev.value += p.l;
        if (!want_grad) continue;
        const Jet5 e = (y[j + 1] - t.A * y[j] - t.B) * invS - t.C;
        for (int k = 0; k < 5; ++k) g[k] += p.x * e.g[k];
        g[kAlpha] += p.a;
        g[kBeta] += p.b;
        if (!want_hess) continue;
        for (int k = 0; k < 5; ++k)
            for (int l = k; l < 5; ++l) H(k, l) += p.xx * e.g[k] * e.g[l] + p.x * e.hess(k, l);
        for (int k = 0; k < 5; ++k) {
            H(std::min(k, int(kAlpha)), std::max(k, int(kAlpha))) += p.xa * e.g[k] * (k == kAlpha ? 2.0 : 1.0);
            H(std::min(k, int(kBeta)), std::max(k, int(kBeta))) += p.xb * e.g[k] * (k == kBeta ? 2.0 : 1.0);
        }
        H(kAlpha, kAlpha) += p.aa;
        H(kAlpha, kBeta) += p.ab;
        H(kBeta, kBeta) += p.bb;
    }
    if (want_grad) {
        for (int k = 0; k < 5; ++k) g[k] += n * t.K.g[k];
        ev.gradient = g;
        ev.has_gradient = true;
    }
    if (want_hess) {
        for (int k = 0; k < 5; ++k)
            for (int l = k; l < 5; ++l) H(k, l) += n * t.K.hess(k, l);
        for (int k = 0; k < 5; ++k)
            for (int l = 0; l < k; ++l) H(k, l) = H(l, k);
        ev.hessian = H;
        ev.has_hessian = true;
    }
    return finalize(ev);
}

using Evaluator = ObjectiveEval (*)(const ModelParams&, const ObservedPath&, Derivatives, bool);

ObjectiveEval quasi_analytic(const ModelParams& th, const ObservedPath& p, Derivatives d, bool ah) {
    return quasi_closed_form(th, p, d, ah);
}

ObjectiveEval exact_analytic(const ModelParams& th, const ObservedPath& p, Derivatives d, bool ah) {
    return jet_loglik(Objective::Exact, th, p, d, ah);
}

double fd_step(double base, double v) { return base * std::max(1.0, std::abs(v)); }

// Value and derivatives with the configured gradient and Hessian modes.
ObjectiveEval assemble(Evaluator eval, const ModelParams& th, const ObservedPath& path, Derivatives derivs,
                       const ObjectiveOptions& opt) {
    path.validate();
    if (!in_engine_range(th)) return ObjectiveEval::invalid("theta outside the density engine range");
    const bool analytic_hessian = opt.hessian == HessianMode::Analytic;
    const bool fd_gradient = opt.gradient == GradientMode::FiniteDifference;

    ObjectiveEval ev = fd_gradient ? eval(th, path, Derivatives::None, false) : eval(th, path, derivs, analytic_hessian);
    if (!ev.valid || derivs == Derivatives::None) return ev;

    const Vec5 x0 = th.vec();
    auto gradient_at = [&](const Vec5& x, Vec5& grad) -> bool {
        const ModelParams p = ModelParams::from_vec(x);
        if (!in_engine_range(p)) return false;
        if (!fd_gradient) {
            const ObjectiveEval e = eval(p, path, Derivatives::Gradient, false);
            if (!e.valid) return false;
            grad = e.gradient;
            return true;
        }
        for (int k = 0; k < 5; ++k) {
            const double step = fd_step(kGradientStep, x[k]);
            Vec5 xp = x, xm = x;
            xp[k] += step;
            xm[k] -= step;
            const ModelParams pp = ModelParams::from_vec(xp), pm = ModelParams::from_vec(xm);
            if (!in_engine_range(pp) || !in_engine_range(pm)) return false;
            const ObjectiveEval ep = eval(pp, path, Derivatives::None, false);
            const ObjectiveEval em = eval(pm, path, Derivatives::None, false);
            if (!ep.valid || !em.valid) return false;
            grad[k] = (ep.value - em.value) / (2.0 * step);
        }
        return true;
    };

    if (fd_gradient) {
        Vec5 grad;
        if (!gradient_at(x0, grad)) return ObjectiveEval::invalid("finite-difference stencil left the engine range");
        ev.gradient = grad;
        ev.has_gradient = true;
    }
    if (derivs == Derivatives::Hessian && !ev.has_hessian) {
        Mat5 H;
        for (int k = 0; k < 5; ++k) {
            const double step = fd_step(kHessianStep, x0[k]);
            Vec5 xp = x0, xm = x0;
            xp[k] += step;
            xm[k] -= step;
            Vec5 gp, gm;
            if (!gradient_at(xp, gp) || !gradient_at(xm, gm))
                return ObjectiveEval::invalid("hessian stencil left the engine range");
            H.col(k) = (gp - gm) / (2.0 * step);
        }
        ev.hessian = 0.5 * (H + H.transpose());
        ev.has_hessian = true;
    }
    return finalize(ev);
}

}  // namespace

ObjectiveEval ObjectiveEval::invalid(std::string why) {
    ObjectiveEval e;
    e.valid = false;
    e.reason = std::move(why);
    e.value = -std::numeric_limits<double>::infinity();
    return e;
}

bool in_engine_range(const ModelParams& th) {
    return std::isfinite(th.lambda) && std::isfinite(th.mu) && std::isfinite(th.alpha) && th.alpha > 0.5 &&
           th.alpha < 2.0 && std::isfinite(th.sigma) && th.sigma > 0.0 && std::isfinite(th.beta) &&
           th.beta > -1.0 && th.beta < 1.0;
}

const char* to_string(Objective o) { return o == Objective::Quasi ? "qmle" : "mle"; }

ScoreKernels score_kernels(double alpha, double beta, double x) {
    const DensityEval e = density_kernel(alpha, beta)->eval(x, DensityOrder::Second);
    if (!(e.value > 0.0)) throw DomainError("score_kernels: density is not positive at x");
    const double r = 1.0 / e.value;
    ScoreKernels s;
    s.psi = e.d_x * r;
    s.f = e.d_alpha * r;
    s.g = e.d_beta * r;
    s.psi_prime = e.d_xx * r - s.psi * s.psi;
    s.f_prime = e.d_xalpha * r - s.psi * s.f;
    s.g_prime = e.d_xbeta * r - s.psi * s.g;
    return s;
}

ObjectiveEval quasi_loglik(const ModelParams& theta, const ObservedPath& path, Derivatives derivs,
                           const ObjectiveOptions& options) {
    return assemble(quasi_analytic, theta, path, derivs, options);
}

ObjectiveEval exact_loglik(const ModelParams& theta, const ObservedPath& path, Derivatives derivs,
                           const ObjectiveOptions& options) {
    return assemble(exact_analytic, theta, path, derivs, options);
}

ObjectiveEval evaluate(Objective objective, const ModelParams& theta, const ObservedPath& path, Derivatives derivs,
                       const ObjectiveOptions& options) {
    return objective == Objective::Quasi ? quasi_loglik(theta, path, derivs, options)
                                         : exact_loglik(theta, path, derivs, options);
}

ObjectiveEval generic_loglik(Objective objective, const ModelParams& theta, const ObservedPath& path,
                             Derivatives derivs) {
    path.validate();
    if (!in_engine_range(theta)) return ObjectiveEval::invalid("theta outside the density engine range");
    return jet_loglik(objective, theta, path, derivs, true);
}

}  // namespace ssou
