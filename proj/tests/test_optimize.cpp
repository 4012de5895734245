#include <doctest.h>

#include <cmath>

#include "ssou/errors.hpp"
#include "ssou/optimize.hpp"

using namespace ssou;

namespace {

// Concave quadratic -0.5 (x - c)' A (x - c) with a correlated A.
ObjectiveFn quadratic(const Vec5& c, const Mat5& A) {
    return [c, A](const Vec5& x) {
        ObjectiveEval e;
        const Vec5 d = x - c;
        e.value = -0.5 * d.dot(A * d);
        e.gradient = -A * d;
        e.has_gradient = true;
        return e;
    };
}

Mat5 spd() {
    Mat5 m;
    m << 4, 1, 0.5, 0, 0, 1, 3, 0.2, 0, 0, 0.5, 0.2, 2, 0.3, 0, 0, 0, 0.3, 1, 0.1, 0, 0, 0, 0.1, 0.5;
    return m;
}

}  // namespace

TEST_SUITE("optimize") {

TEST_CASE("interior maximum of a quadratic") {
    Vec5 c;
    c << 1.0, -3.0, 1.6, 4.0, 0.2;
    Vec5 start;
    start << 0.0, 0.0, 1.5, 2.0, 0.0;
    const OptResult r = maximize(quadratic(c, spd()), start);
    CHECK(r.converged);
    CHECK((r.theta - c).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("maximum on an active bound") {
    Vec5 c;
    c << 1.0, -3.0, 2.4, 4.0, 0.2;  // alpha beyond its upper bound
    Vec5 start;
    start << 0.0, 0.0, 1.5, 2.0, 0.0;
    const OptResult r = maximize(quadratic(c, spd()), start);
    CHECK(r.theta[kAlpha] == doctest::Approx(Bounds::defaults().hi[kAlpha]));
    CHECK(r.grad_norm < 1e-5);
}

TEST_CASE("pinned coordinates do not move") {
    Vec5 c;
    c << 1.0, -3.0, 1.6, 4.0, 0.2;
    Vec5 start;
    start << 0.0, 0.0, 1.5, 2.0, 0.0;
    OptimizerConfig cfg;
    for (int k : {int(kAlpha), int(kSigma), int(kBeta)}) cfg.bounds.lo[k] = cfg.bounds.hi[k] = start[k];
    const OptResult r = maximize(quadratic(c, spd()), start, cfg);
    CHECK(r.converged);
    CHECK(r.theta[kAlpha] == start[kAlpha]);
    CHECK(r.theta[kSigma] == start[kSigma]);
    CHECK(r.theta[kBeta] == start[kBeta]);
    CHECK(r.iterations < 30);
}

TEST_CASE("preconditioning by a rate function") {
    Vec5 c;
    c << 1.0, -3.0, 1.6, 4.0, 0.2;
    Vec5 start;
    start << 0.0, 0.0, 1.5, 2.0, 0.0;
    const Mat5 P = Vec5(10.0, 10.0, 0.01, 0.1, 0.05).asDiagonal();
    Mat5 A = P.inverse() * spd() * P.inverse();
    const OptResult r = maximize(quadratic(c, A), start, {}, [P](const Vec5&) { return P; });
    CHECK(r.converged);
    CHECK((P.inverse() * (r.theta - c)).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("start outside the bounds is rejected") {
    Vec5 start;
    start << 0.0, 0.0, 2.5, 2.0, 0.0;
    CHECK_THROWS_AS(maximize(quadratic(Vec5::Zero(), spd()), start), InvalidInput);
}

TEST_CASE("objective that never improves raises NoAscentError") {
    auto f = [](const Vec5& x) {
        ObjectiveEval e;
        e.value = x.isApprox(Vec5(0.0, 0.0, 1.5, 2.0, 0.0)) ? 0.0 : -1.0;
        e.gradient = Vec5::Ones();
        e.has_gradient = true;
        return e;
    };
    Vec5 start;
    start << 0.0, 0.0, 1.5, 2.0, 0.0;
    CHECK_THROWS_AS(maximize(f, start), NoAscentError);
}

}
