#include "ssou/optimize.hpp"

#include <cmath>

#include "ssou/errors.hpp"

namespace ssou {

Bounds Bounds::defaults() {
    Bounds b;
    b.lo << -100.0, -1000.0, 1.005, 0.005, -0.995;
    b.hi << 100.0, 1000.0, 1.995, 1e6, 0.995;
    return b;
}

bool Bounds::contains(const Vec5& x) const {
    return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
}

Vec5 Bounds::project(const Vec5& x) const { return x.cwiseMax(lo).cwiseMin(hi); }

namespace {

// Zeroes gradient components that push against an active bound.
Vec5 free_gradient(const Vec5& g, const Vec5& x, const Bounds& b) {
    Vec5 out = g;
    for (int k = 0; k < 5; ++k)
        if ((x[k] <= b.lo[k] && g[k] < 0.0) || (x[k] >= b.hi[k] && g[k] > 0.0)) out[k] = 0.0;
    return out;
}

}  // namespace

OptResult maximize(const ObjectiveFn& f, const Vec5& start, const OptimizerConfig& cfg, const RateFn& rate) {
    require(start.allFinite() && cfg.bounds.contains(start), "maximize: start must lie within the bounds");
    const Mat5 P = rate ? rate(start) : Mat5::Identity();
    const Eigen::FullPivLU<Mat5> Plu(P);
    require(Plu.isInvertible(), "maximize: rate matrix at the start is singular");
    auto normalized = [&](const Vec5& x, const Vec5& g) {
        const Mat5 R = rate ? rate(x) : Mat5::Identity();
        return (R.transpose() * free_gradient(g, x, cfg.bounds)).cwiseAbs().maxCoeff();
    };

    // Rescaled coordinates that only move parameters pinned by lo == hi stay frozen.
    Vec5 freev = Vec5::Ones();
    for (int k = 0; k < 5; ++k) {
        bool pinned = true;
        for (int j = 0; j < 5; ++j)
            if (P(j, k) != 0.0 && cfg.bounds.lo[j] < cfg.bounds.hi[j]) pinned = false;
        if (pinned) freev[k] = 0.0;
    }

    OptResult res;
    ObjectiveEval cur = f(start);
    ++res.evaluations;
    if (!cur.valid || !cur.has_gradient) throw InvalidInput("maximize: objective invalid at start: " + cur.reason);
    Vec5 x = start;
    Vec5 gv = freev.cwiseProduct(P.transpose() * cur.gradient);  // gradient in rescaled coordinates
    Mat5 Hinv = Mat5::Identity();
    bool scaled = false;
    res.grad_norm = normalized(x, cur.gradient);

    for (int it = 0; it < cfg.max_iters; ++it) {
        res.iterations = it;
        if (res.grad_norm <= cfg.grad_tol) {
            res.converged = true;
            res.reason = "gradient tolerance";
            break;
        }
        // Search direction in theta, with outward components at active bounds removed.
        Vec5 dtheta = P * (Hinv * gv);
        for (int k = 0; k < 5; ++k)
            if ((x[k] <= cfg.bounds.lo[k] && dtheta[k] < 0.0) || (x[k] >= cfg.bounds.hi[k] && dtheta[k] > 0.0))
                dtheta[k] = 0.0;
        double slope = cur.gradient.dot(dtheta);
        if (!(slope > 0.0)) {
            Hinv = Mat5::Identity();
            scaled = false;
            dtheta = P * gv;
            for (int k = 0; k < 5; ++k)
                if ((x[k] <= cfg.bounds.lo[k] && dtheta[k] < 0.0) || (x[k] >= cfg.bounds.hi[k] && dtheta[k] > 0.0))
                    dtheta[k] = 0.0;
            slope = cur.gradient.dot(dtheta);
            if (!(slope > 0.0)) {
                res.converged = res.grad_norm <= cfg.accept_grad;
                res.reason = "no ascent direction";
                break;
            }
        }
        const double vlen = Plu.solve(dtheta).cwiseAbs().maxCoeff();
        double t = vlen > cfg.max_step ? cfg.max_step / vlen : 1.0;

        bool accepted = false;
        Vec5 xn;
        ObjectiveEval next;
        for (int bt = 0; bt < cfg.max_backtracks; ++bt, t *= 0.5) {
            xn = cfg.bounds.project(x + t * dtheta);
            next = f(xn);
            ++res.evaluations;
            if (!next.valid || !next.has_gradient) continue;
            if (next.value >= cur.value + cfg.armijo * cur.gradient.dot(xn - x) && next.value >= cur.value) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (it == 0 && res.grad_norm > cfg.accept_grad)
                throw NoAscentError("maximize: line search from the start point found no ascent");
            res.converged = res.grad_norm <= cfg.accept_grad;
            res.reason = "line search failed";
            break;
        }

        const Vec5 s = freev.cwiseProduct(Plu.solve(xn - x));
        const Vec5 gvn = freev.cwiseProduct(P.transpose() * next.gradient);
        const Vec5 y = gv - gvn;  // change of the gradient of -f
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (!scaled) {
                Hinv = Mat5::Identity() * (sy / y.squaredNorm());
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const Mat5 V = Mat5::Identity() - rho * s * y.transpose();
            Hinv = V * Hinv * V.transpose() + rho * s * s.transpose();
        }
        x = xn;
        cur = next;
        gv = gvn;
        res.grad_norm = normalized(x, cur.gradient);
        res.iterations = it + 1;
        if (s.cwiseAbs().maxCoeff() < cfg.step_tol) {
            res.converged = res.grad_norm <= cfg.accept_grad;
            res.reason = "step tolerance";
            break;
        }
    }
    if (res.reason.empty()) {
        if (res.grad_norm <= cfg.grad_tol) {
            res.converged = true;
            res.reason = "gradient tolerance";
        } else {
            res.reason = "iteration limit";
        }
    }
    res.theta = x;
    res.value = cur.value;
    return res;
}

}  // namespace ssou
