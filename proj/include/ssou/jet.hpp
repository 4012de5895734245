#pragma once

// Second-order forward-mode automatic differentiation over N variables.
//
// A Jet carries a value, its gradient and the packed upper triangle of its
// Hessian. Arithmetic propagates all three exactly, so a function written as a
// template over the scalar type yields first and second partials when called
// with Jets. Used for the closed-form pieces (tail series, transition law)
// where writing the derivatives by hand would be error-prone.

#include <array>
#include <cmath>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

namespace ssou::ad {

template <int N>
struct Jet {
    static constexpr int kHess = N * (N + 1) / 2;

    double v = 0.0;
    std::array<double, N> g{};
    std::array<double, kHess> h{};

    Jet() = default;
    Jet(double value) : v(value) {}  // NOLINT: implicit constants are intended

    // Independent variable number `i` with value `value`.
    static Jet variable(double value, int i) {
        Jet out(value);
        out.g[i] = 1.0;
        return out;
    }

    static constexpr int index(int i, int j) {
        if (i > j) {
            int t = i;
            i = j;
            j = t;
        }
        return i * N - i * (i - 1) / 2 + (j - i);
    }

    double hess(int i, int j) const { return h[index(i, j)]; }
};

// Applies a scalar function with value f0, first derivative f1, second f2.
template <int N>
Jet<N> chain(const Jet<N>& a, double f0, double f1, double f2) {
    Jet<N> out(f0);
    for (int i = 0; i < N; ++i) out.g[i] = f1 * a.g[i];
    for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j) {
            const int k = Jet<N>::index(i, j);
            out.h[k] = f1 * a.h[k] + f2 * a.g[i] * a.g[j];
        }
    return out;
}

template <int N>
Jet<N> operator+(const Jet<N>& a, const Jet<N>& b) {
    Jet<N> out(a.v + b.v);
    for (int i = 0; i < N; ++i) out.g[i] = a.g[i] + b.g[i];
    for (int k = 0; k < Jet<N>::kHess; ++k) out.h[k] = a.h[k] + b.h[k];
    return out;
}

template <int N>
Jet<N> operator-(const Jet<N>& a, const Jet<N>& b) {
    Jet<N> out(a.v - b.v);
    for (int i = 0; i < N; ++i) out.g[i] = a.g[i] - b.g[i];
    for (int k = 0; k < Jet<N>::kHess; ++k) out.h[k] = a.h[k] - b.h[k];
    return out;
}

template <int N>
Jet<N> operator-(const Jet<N>& a) {
    Jet<N> out(-a.v);
    for (int i = 0; i < N; ++i) out.g[i] = -a.g[i];
    for (int k = 0; k < Jet<N>::kHess; ++k) out.h[k] = -a.h[k];
    return out;
}

template <int N>
Jet<N> operator*(const Jet<N>& a, const Jet<N>& b) {
    Jet<N> out(a.v * b.v);
    for (int i = 0; i < N; ++i) out.g[i] = a.v * b.g[i] + b.v * a.g[i];
    for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j) {
            const int k = Jet<N>::index(i, j);
            out.h[k] = a.v * b.h[k] + b.v * a.h[k] + a.g[i] * b.g[j] + a.g[j] * b.g[i];
        }
    return out;
}

template <int N>
Jet<N> operator*(double s, const Jet<N>& a) {
    Jet<N> out(s * a.v);
    for (int i = 0; i < N; ++i) out.g[i] = s * a.g[i];
    for (int k = 0; k < Jet<N>::kHess; ++k) out.h[k] = s * a.h[k];
    return out;
}

template <int N>
Jet<N> operator*(const Jet<N>& a, double s) {
    return s * a;
}

template <int N>
Jet<N> operator+(const Jet<N>& a, double s) {
    Jet<N> out = a;
    out.v += s;
    return out;
}

template <int N>
Jet<N> operator+(double s, const Jet<N>& a) {
    return a + s;
}

template <int N>
Jet<N> operator-(const Jet<N>& a, double s) {
    return a + (-s);
}

template <int N>
Jet<N> operator-(double s, const Jet<N>& a) {
    return (-a) + s;
}

template <int N>
Jet<N> reciprocal(const Jet<N>& a) {
    const double r = 1.0 / a.v;
    return chain(a, r, -r * r, 2.0 * r * r * r);
}

template <int N>
Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) {
    return a * reciprocal(b);
}

template <int N>
Jet<N> operator/(const Jet<N>& a, double s) {
    return (1.0 / s) * a;
}

template <int N>
Jet<N> operator/(double s, const Jet<N>& a) {
    return s * reciprocal(a);
}

template <int N>
Jet<N> exp(const Jet<N>& a) {
    const double e = std::exp(a.v);
    return chain(a, e, e, e);
}

template <int N>
Jet<N> expm1(const Jet<N>& a) {
    const double e = std::exp(a.v);
    return chain(a, std::expm1(a.v), e, e);
}

template <int N>
Jet<N> log(const Jet<N>& a) {
    const double r = 1.0 / a.v;
    return chain(a, std::log(a.v), r, -r * r);
}

template <int N>
Jet<N> log1p(const Jet<N>& a) {
    const double r = 1.0 / (1.0 + a.v);
    return chain(a, std::log1p(a.v), r, -r * r);
}

template <int N>
Jet<N> sqrt(const Jet<N>& a) {
    const double s = std::sqrt(a.v);
    return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

template <int N>
Jet<N> sin(const Jet<N>& a) {
    const double s = std::sin(a.v), c = std::cos(a.v);
    return chain(a, s, c, -s);
}

template <int N>
Jet<N> cos(const Jet<N>& a) {
    const double s = std::sin(a.v), c = std::cos(a.v);
    return chain(a, c, -s, -c);
}

template <int N>
Jet<N> tan(const Jet<N>& a) {
    const double t = std::tan(a.v);
    const double d = 1.0 + t * t;
    return chain(a, t, d, 2.0 * t * d);
}

template <int N>
Jet<N> atan(const Jet<N>& a) {
    const double d = 1.0 / (1.0 + a.v * a.v);
    return chain(a, std::atan(a.v), d, -2.0 * a.v * d * d);
}

template <int N>
Jet<N> pow(const Jet<N>& a, double p) {
    const double f0 = std::pow(a.v, p);
    return chain(a, f0, p * f0 / a.v, p * (p - 1.0) * f0 / (a.v * a.v));
}

// std::lgamma writes the global signgam; lgamma_r keeps threads independent.
inline double lgamma_safe(double x) {
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

template <int N>
Jet<N> lgamma(const Jet<N>& a) {
    return chain(a, lgamma_safe(a.v), boost::math::digamma(a.v), boost::math::trigamma(a.v));
}

// Plain-double overloads so templates can call the same names.
inline double value(double x) { return x; }
template <int N>
double value(const Jet<N>& x) {
    return x.v;
}

}  // namespace ssou::ad
