#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ssou/errors.hpp"
#include "ssou/pipeline.hpp"

using namespace ssou;

namespace {

ObservedPath design_path(double T, int n, std::uint64_t seed) {
    RngStream rng(seed);
    return simulate_path(ModelParams{}, 0.0, SamplingScheme(T, n), rng);
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("time-scale map is the identity at tau = 1") {
    const TimeScaleParams p{0.7, -1.3, 1.45, 1.0, 0.35};
    const ModelParams q = to_time_scaled(p);
    CHECK(q.lambda == p.lambda);
    CHECK(q.mu == p.mu);
    CHECK(q.alpha == p.alpha);
    CHECK(q.sigma == 1.0);
    CHECK(q.beta == p.beta);
}

TEST_CASE("time-scale drift adjustment vanishes without skewness") {
    const ModelParams q = to_time_scaled(TimeScaleParams{1.0, 2.0, 1.5, 3.7, 0.0});
    CHECK(q.mu == doctest::Approx(2.0 * 3.7));
    CHECK(q.sigma == doctest::Approx(std::pow(3.7, 1.0 / 1.5)));
}

TEST_CASE("time-scale map round trip") {
    const TimeScaleParams p{1.2, 0.4, 1.7, 11.2, -0.6};
    const TimeScaleParams r = from_time_scaled(to_time_scaled(p));
    CHECK(r.lambda == doctest::Approx(p.lambda).epsilon(1e-13));
    CHECK(r.mu == doctest::Approx(p.mu).epsilon(1e-12));
    CHECK(r.tau == doctest::Approx(p.tau).epsilon(1e-13));
    CHECK(r.beta == p.beta);
}

TEST_CASE("time-scaled process reads the same path on the unit interval") {
    // Y on [0, T] observed at t_j = j T / n is the time-scaled process at s_j = j / n.
    const TimeScaleParams ts{1.0, 2.0, 1.5, 7.0, 0.5};
    const ModelParams orig{ts.lambda, ts.mu, ts.alpha, 1.0, ts.beta};
    const ModelParams tilde = to_time_scaled(ts);
    RngStream a(9), b(9);
    const ObservedPath p = simulate_path(orig, 0.0, SamplingScheme(ts.tau, 200), a);
    const ObservedPath q = simulate_path(tilde, 0.0, SamplingScheme(1.0, 200), b);
    for (int j = 0; j <= 200; ++j) CHECK(p.values[j] == doctest::Approx(q.values[j]).epsilon(1e-9).scale(1.0));
}

TEST_CASE("moment method is fast and finite") {
    const ObservedPath p = design_path(1.0, 2000, 1);
    const EstimationResult r = estimate(p, Method::Moment);
    CHECK(r.runtime_s < 1.0);
    CHECK(std::isfinite(r.theta_hat[kAlpha]));
    CHECK(std::isfinite(r.theta_hat[kSigma]));
    CHECK(std::isfinite(r.theta_hat[kBeta]));
    CHECK(std::isnan(r.theta_hat[kLambda]));
}

TEST_CASE("quasi and exact fits agree within joint standard errors") {
    const ObservedPath p = design_path(100.0, 2000, 2);
    const EstimationResult q = estimate(p, Method::Qmle);
    const EstimationResult m = estimate(p, Method::Mle);
    REQUIRE(q.converged);
    REQUIRE(m.converged);
    REQUIRE(m.has_info);
    const Vec5 z = studentize(q.theta_hat, m.theta_hat, m.info, m.rate);
    CHECK(z.norm() < 3.0);
}

TEST_CASE("time-scale fit equals the quasi fit when T = 1") {
    const ObservedPath p = design_path(1.0, 2000, 3);
    const EstimationResult q = estimate(p, Method::Qmle);
    const EstimationResult t = estimate(p, Method::Timescale);
    REQUIRE(t.converged);
    CHECK(t.loglik == doctest::Approx(q.loglik).epsilon(1e-9));
    const Vec5 z = studentize(t.theta_hat, q.theta_hat, q.info, q.rate);
    CHECK(z.cwiseAbs().maxCoeff() < 1e-2);
    CHECK(t.tau == doctest::Approx(std::pow(t.theta_hat[kSigma], t.theta_hat[kAlpha])));
}

TEST_CASE("estimates carry observed information and standard errors") {
    const ObservedPath p = design_path(1.0, 2000, 4);
    const EstimationResult r = estimate(p, Method::Mle);
    CHECK(r.has_info);
    CHECK(r.info_min_eig > 0.0);
    CHECK(r.std_err.allFinite());
    CHECK((r.info - r.info.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("method names") {
    for (Method m : {Method::Moment, Method::Qmle, Method::Mle, Method::Timescale})
        CHECK(parse_method(to_string(m)) == m);
    CHECK_THROWS_AS(parse_method("bogus"), InvalidInput);
}

}
