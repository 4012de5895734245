#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <numbers>

#include "ssou/ou.hpp"

using namespace ssou;
using cplx = std::complex<double>;

namespace {

// Levy exponent of J_1 ~ S0(alpha, beta, 1, 0), written out independently of char_fn.
cplx levy_exponent(double a, double b, double w) {
    const double aw = std::abs(w);
    if (aw == 0.0) return 0.0;
    const double t = std::tan(std::numbers::pi * a / 2.0);
    const double sg = w > 0 ? 1.0 : -1.0;
    return cplx(-std::pow(aw, a), -std::pow(aw, a) * b * sg * t * (std::pow(aw, 1.0 - a) - 1.0));
}

// CF of int_0^h e^{-lambda (h - s)} sigma dJ_s by quadrature of the Levy exponent.
cplx noise_cf_oracle(const ModelParams& th, double h, double u) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    auto re = [&](double v) { return levy_exponent(th.alpha, th.beta, th.sigma * u * std::exp(-th.lambda * v)).real(); };
    auto im = [&](double v) { return levy_exponent(th.alpha, th.beta, th.sigma * u * std::exp(-th.lambda * v)).imag(); };
    return std::exp(cplx(GK::integrate(re, 0.0, h, 15, 1e-14), GK::integrate(im, 0.0, h, 15, 1e-14)));
}

cplx noise_cf(const TransitionLaw& tl, const ModelParams& th, double u) {
    return char_fn(StableParams{th.alpha, th.beta, tl.sigma_h, tl.mu_h}, u);
}

}  // namespace

TEST_SUITE("ou") {

TEST_CASE("transition noise law matches the integrated Levy exponent") {
    for (double a : {1.2, 1.5, 1.8})
        for (double lam : {0.3, 2.0})
            for (double h : {0.001, 0.05, 0.7}) {
                const ModelParams th{lam, 2.0, a, 1.3, 0.6};
                const TransitionLaw tl = transition(th, h);
                for (double u : {0.5, 2.0, 7.0}) {
                    CAPTURE(a);
                    CAPTURE(lam);
                    CAPTURE(h);
                    CAPTURE(u);
                    CHECK(std::abs(noise_cf(tl, th, u) - noise_cf_oracle(th, h, u)) < 1e-11);
                }
                CHECK(tl.decay == doctest::Approx(std::exp(-lam * h)).epsilon(1e-14));
                CHECK(tl.drift_term == doctest::Approx(2.0 * (1.0 - std::exp(-lam * h)) / lam).epsilon(1e-12));
            }
}

TEST_CASE("Chapman-Kolmogorov identity for the conditional characteristic function") {
    const double y = 0.7;
    for (double a : {1.1, 1.5, 1.9})
        for (double lam : {0.5, 3.0})
            for (double h : {0.01, 0.5}) {
                const ModelParams th{lam, -1.0, a, 2.0, -0.4};
                const TransitionLaw one = transition(th, h), two = transition(th, 2.0 * h);
                for (double u : {0.1, 0.5, 1.0, 2.0}) {
                    const cplx direct = std::exp(cplx(0.0, u * (two.decay * y + two.drift_term))) * noise_cf(two, th, u);
                    const double loc = one.decay * (one.decay * y + one.drift_term) + one.drift_term;
                    const cplx composed =
                        std::exp(cplx(0.0, u * loc)) * noise_cf(one, th, one.decay * u) * noise_cf(one, th, u);
                    CHECK(std::abs(direct - composed) < 1e-10);
                }
            }
}

TEST_CASE("small lambda is continuous with the Levy limit") {
    const ModelParams th0{0.0, 1.0, 1.6, 2.0, 0.5}, th1{1e-9, 1.0, 1.6, 2.0, 0.5};
    const TransitionLaw a = transition(th0, 0.1), b = transition(th1, 0.1);
    CHECK(a.sigma_h == doctest::Approx(b.sigma_h).epsilon(1e-9));
    CHECK(a.mu_h == doctest::Approx(b.mu_h).epsilon(1e-9));
    CHECK(a.sigma_h == doctest::Approx(2.0 * std::pow(0.1, 1.0 / 1.6)).epsilon(1e-14));
}

TEST_CASE("long horizon transition approaches the stationary law") {
    const ModelParams th{0.8, 1.5, 1.4, 1.2, 0.3};
    const TransitionLaw tl = transition(th, 80.0);
    const StableParams st = stationary_law(th);
    CHECK(tl.sigma_h == doctest::Approx(st.sigma).epsilon(1e-12));
    CHECK(tl.drift_term + tl.mu_h == doctest::Approx(st.mu).epsilon(1e-10));
}

TEST_CASE("one-step increments follow the transition law") {
    const ModelParams th{1.0, 2.0, 1.5, 5.0, 0.5};
    const SamplingScheme sc(100.0, 100000);
    RngStream rng(5);
    const ObservedPath p = simulate_path(th, 0.0, sc, rng);
    const auto eps = exact_residuals(th, p);
    REQUIRE(eps.size() == 100000);
    for (double u : {0.3, 1.0, 2.5}) {
        cplx m = 0.0;
        for (double e : eps) m += std::exp(cplx(0.0, u * e));
        m /= static_cast<double>(eps.size());
        CHECK(std::abs(m - char_fn(StableParams{1.5, 0.5, 1.0, 0.0}, u)) < 0.015);
    }
}

TEST_CASE("near-deterministic path follows the ODE") {
    const ModelParams th{1.5, 3.0, 1.5, 1e-12, 0.5};
    RngStream rng(1);
    const ObservedPath p = simulate_path(th, 4.0, SamplingScheme(2.0, 400), rng);
    for (int j = 0; j <= 400; ++j) {
        const double t = j * 2.0 / 400;
        CHECK(std::abs(p.values[j] - (2.0 + 2.0 * std::exp(-1.5 * t))) < 1e-6);
    }
}

TEST_CASE("simulation is reproducible and has n + 1 points") {
    const ModelParams th;
    RngStream a(3), b(3);
    const ObservedPath p = simulate_path(th, 0.0, SamplingScheme(1.0, 2000), a);
    const ObservedPath q = simulate_path(th, 0.0, SamplingScheme(1.0, 2000), b);
    CHECK(p.values.size() == 2001);
    CHECK(p.values == q.values);
}

TEST_CASE("centering term closed form and small-step limit") {
    for (double a : {1.2, 1.5, 1.9})
        for (double h : {1e-6, 1e-3, 0.1}) {
            const double t = std::tan(std::numbers::pi * a / 2.0);
            CHECK(xi_h(a, h) == doctest::Approx(t * (1.0 - std::pow(h, 1.0 - 1.0 / a))).epsilon(1e-12));
        }
    CHECK(std::abs(xi_h(1.5, 1e-12) - std::tan(0.75 * std::numbers::pi)) < 1e-3);
    // Finite through alpha = 1, where it equals (2 / pi) log h.
    CHECK(xi_h(1.0, 1e-3) == doctest::Approx(2.0 / std::numbers::pi * std::log(1e-3)).epsilon(1e-12));
    const XiTerms xt = xi_terms(1.5, 1e-3);
    const double fd = (xi_h(1.5 + 1e-6, 1e-3) - xi_h(1.5 - 1e-6, 1e-3)) / 2e-6;
    CHECK(xt.d1 == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("Euler residuals at zero drift are standardized increments") {
    const ModelParams th{0.0, 0.0, 1.5, 2.0, 0.0};
    ObservedPath p;
    p.values = {0.0, 1.0, 3.0};
    p.scheme = SamplingScheme(2.0, 2);
    const auto e = euler_residuals(th, p);
    REQUIRE(e.size() == 2);
    CHECK(e[0] == doctest::Approx(0.5));
    CHECK(e[1] == doctest::Approx(1.0));
}

TEST_CASE("trapezoid time averages") {
    ObservedPath p;
    p.values = {0.0, 0.5, 1.0, 1.5, 2.0};
    p.scheme = SamplingScheme(2.0, 4);
    const PathSummary s = path_summary(p);
    CHECK(s.ybar == doctest::Approx(1.0));
    CHECK(s.y2bar == doctest::Approx((0.25 + 1.0 + 2.25 + 2.0) / 4.0));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS(ModelParams{1.0, 2.0, 2.5, 5.0, 0.5}.validate());
    CHECK_THROWS(ModelParams{1.0, 2.0, 1.5, 0.0, 0.5}.validate());
    CHECK_THROWS(SamplingScheme(-1.0, 10));
    CHECK_THROWS(SamplingScheme(1.0, 0));
}

}
