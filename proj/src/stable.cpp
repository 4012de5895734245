#include "ssou/stable.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ssou/errors.hpp"
#include "ssou/jet.hpp"

namespace ssou {

using std::numbers::pi;

void StableParams::validate() const {
    require(std::isfinite(alpha) && alpha > 0.0 && alpha < 2.0, "alpha must lie in (0, 2)");
    require(std::isfinite(beta) && beta >= -1.0 && beta <= 1.0, "beta must lie in [-1, 1]");
    require(std::isfinite(sigma) && sigma > 0.0, "sigma must be positive");
    require(std::isfinite(mu), "mu must be finite");
}

namespace detail {

double inversion_cutoff(double alpha) {
    return std::pow(39.1, 1.0 / alpha);
}

Shape make_shape(double alpha, double beta) {
    Shape s;
    s.alpha = alpha;
    s.beta = beta;
    s.eps = alpha - 1.0;
    s.t = std::tan(alpha * pi / 2.0);
    const double z = pi * s.eps / 2.0;
    double C, C1, C2;
    if (std::abs(z) < 0.1) {
        const double z2 = z * z;
        C = 1.0 - z2 * (1.0 / 3.0 + z2 * (1.0 / 45.0 + z2 * (2.0 / 945.0 + z2 * (1.0 / 4725.0 + z2 * 2.0 / 93555.0))));
        C1 = -z * (2.0 / 3.0 + z2 * (4.0 / 45.0 + z2 * (12.0 / 945.0 + z2 * (8.0 / 4725.0 + z2 * 20.0 / 93555.0))));
        C2 = -(2.0 / 3.0 + z2 * (12.0 / 45.0 + z2 * (60.0 / 945.0 + z2 * (56.0 / 4725.0 + z2 * 180.0 / 93555.0))));
    } else {
        const double sn = std::sin(z), cs = std::cos(z);
        const double csc2 = 1.0 / (sn * sn);
        C = z * cs / sn;
        C1 = cs / sn - z * csc2;
        C2 = -2.0 * csc2 + 2.0 * z * csc2 * cs / sn;
    }
    s.A = (2.0 / pi) * C;
    s.A1 = C1;
    s.A2 = (pi / 2.0) * C2;
    return s;
}

void g_terms(const Shape& s, double u, double& G, double& G1, double& G2) {
    const double L = std::log(u);
    const double x = s.eps * L;
    double B, B1, B2;
    if (std::abs(x) < 0.5) {
        // expm1(x)/x = sum x^k / (k+1)!
        B = 0.0;
        B1 = 0.0;
        B2 = 0.0;
        double c = 1.0;  // 1/(k+1)!
        double xk = 1.0;
        double xk1 = 0.0, xk2 = 0.0;  // x^(k-1), x^(k-2)
        for (int k = 0; k < 24; ++k) {
            c /= (k + 1);
            B += c * xk;
            if (k >= 1) B1 += k * c * xk1;
            if (k >= 2) B2 += k * (k - 1) * c * xk2;
            xk2 = xk1;
            xk1 = xk;
            xk *= x;
        }
    } else {
        const double em = std::expm1(x);
        const double e = em + 1.0;
        B = em / x;
        B1 = (x * e - em) / (x * x);
        B2 = (x * x * e - 2.0 * x * e + 2.0 * em) / (x * x * x);
    }
    G = -L * s.A * B;
    G1 = -L * (s.A1 * B + s.A * L * B1);
    G2 = -L * (s.A2 * B + 2.0 * s.A1 * L * B1 + s.A * L * L * B2);
}

int channel_count(DensityOrder order) {
    switch (order) {
        case DensityOrder::Value: return 1;
        case DensityOrder::First: return 4;
        case DensityOrder::Second: return 10;
    }
    return 10;
}

void channel_factors(const Shape& s, double u, int nch, std::complex<double>* out) {
    using C = std::complex<double>;
    double G, G1, G2;
    g_terms(s, u, G, G1, G2);
    const double L = std::log(u);
    const double ua = std::exp(s.alpha * L);
    const C w = std::exp(C(-ua, s.beta * u * G));
    out[0] = w;
    if (nch == 1) return;
    const C mi_u(0.0, -u);
    const C Ea(-ua * L, s.beta * u * G1);
    const C Eb(0.0, u * G);
    out[1] = w * mi_u;
    out[2] = w * Ea;
    out[3] = w * Eb;
    if (nch == 4) return;
    const C Eaa(-ua * L * L, s.beta * u * G2);
    const C Eab(0.0, u * G1);
    out[4] = w * (-u * u);
    out[5] = out[2] * mi_u;
    out[6] = out[3] * mi_u;
    out[7] = w * (Eaa + Ea * Ea);
    out[8] = w * (Eab + Ea * Eb);
    out[9] = w * (Eb * Eb);
}

double tail_argument(double alpha, double beta, double x) {
    return x + beta * std::tan(alpha * pi / 2.0);
}

namespace {

constexpr double kTailTol = 1e-13;

inline double lgam(double x) { return ad::lgamma_safe(x); }
template <int N>
ad::Jet<N> lgam(const ad::Jet<N>& x) {
    return ad::lgamma(x);
}
constexpr int kTailMaxTerms = 100;

// Asymptotic expansion of the standardized density for large |x + beta t|:
//   (1/pi) sum_k (-1)^k Gamma(k alpha + 1)/k! |c|^k x'^(-k alpha - 1) cos(k gamma + pi (k alpha + 1)/2)
// with c = 1 - i beta t = |c| exp(-i gamma). Negative x' uses the reflection
// phi_{alpha,beta}(x) = phi_{alpha,-beta}(-x).
template <class T>
bool tail_series(const T& x, const T& alpha, T beta, T& out) {
    using ad::value;
    using std::atan, std::cos, std::exp, std::log, std::log1p, std::tan;
    const T t = tan(alpha * (pi / 2.0));
    T xp = x + beta * t;
    if (value(xp) < 0.0) {
        xp = -xp;
        beta = -beta;
    }
    if (!(value(xp) >= kTailThreshold)) return false;
    const T lx = log(xp);
    const T bt = beta * t;
    const T logc = 0.5 * log1p(bt * bt);
    const T gam = atan(bt);
    const double scale = 2.0 + std::abs(value(lx)) + std::abs(value(logc));
    T sum(0.0);
    double prev_bound = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= kTailMaxTerms; ++k) {
        const T ka1 = double(k) * alpha + 1.0;
        const T la = lgam(ka1) - ad::lgamma_safe(k + 1.0) + double(k) * logc - ka1 * lx;
        T term = exp(la) * cos(double(k) * gam + (pi / 2.0) * ka1);
        if (k % 2 == 1) term = -term;
        sum = sum + term;
        const double grow = 1.0 + k * scale;
        const double bound = std::exp(value(la)) * grow * grow;
        if (bound <= kTailTol * std::abs(value(sum))) {
            out = sum * (1.0 / pi);
            return true;
        }
        if (bound >= prev_bound) return false;
        prev_bound = bound;
    }
    return false;
}

using Jet3 = ad::Jet<3>;

DensityEval from_jet(const Jet3& j) {
    DensityEval e;
    e.value = j.v;
    e.d_x = j.g[0];
    e.d_alpha = j.g[1];
    e.d_beta = j.g[2];
    e.d_xx = j.hess(0, 0);
    e.d_xalpha = j.hess(0, 1);
    e.d_xbeta = j.hess(0, 2);
    e.d_alphaalpha = j.hess(1, 1);
    e.d_alphabeta = j.hess(1, 2);
    e.d_betabeta = j.hess(2, 2);
    return e;
}

void assign_channel(DensityEval& e, int c, double v) {
    switch (c) {
        case 0: e.value = v; break;
        case 1: e.d_x = v; break;
        case 2: e.d_alpha = v; break;
        case 3: e.d_beta = v; break;
        case 4: e.d_xx = v; break;
        case 5: e.d_xalpha = v; break;
        case 6: e.d_xbeta = v; break;
        case 7: e.d_alphaalpha = v; break;
        case 8: e.d_alphabeta = v; break;
        case 9: e.d_betabeta = v; break;
        default: break;
    }
}

// Gauss-Kronrod 21 on [-1, 1], expanded from the Boost half tables.
struct GK21 {
    std::array<double, 21> x{}, wk{}, wg{};
};

const GK21& gk21() {
    static const GK21 rule = [] {
        using boost::math::quadrature::gauss;
        using boost::math::quadrature::gauss_kronrod;
        const auto& a = gauss_kronrod<double, 21>::abscissa();
        const auto& w = gauss_kronrod<double, 21>::weights();
        const auto& gw = gauss<double, 10>::weights();
        GK21 r;
        int idx = 0;
        for (int i = 10; i >= 1; --i, ++idx) {
            r.x[idx] = -a[i];
            r.wk[idx] = w[i];
            r.wg[idx] = (i % 2 == 1) ? gw[(i - 1) / 2] : 0.0;
        }
        r.x[idx] = 0.0;
        r.wk[idx] = w[0];
        r.wg[idx] = 0.0;
        ++idx;
        for (int i = 1; i <= 10; ++i, ++idx) {
            r.x[idx] = a[i];
            r.wk[idx] = w[i];
            r.wg[idx] = (i % 2 == 1) ? gw[(i - 1) / 2] : 0.0;
        }
        return r;
    }();
    return rule;
}

constexpr int kMaxChannels = 10;
constexpr std::size_t kPanelBudget = 60000;
constexpr double kAdaptiveRelTol = 1e-10;
constexpr double kAdaptiveAbsFloor = 1e-13;

struct Panel {
    double a = 0.0, b = 0.0;
    std::array<double, kMaxChannels> k{}, err{}, l1{};
};

Panel eval_panel(const Shape& s, double x, int nch, double a, double b) {
    const GK21& r = gk21();
    Panel p;
    p.a = a;
    p.b = b;
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    std::array<double, kMaxChannels> g{};
    std::complex<double> F[kMaxChannels];
    for (int i = 0; i < 21; ++i) {
        const double u = c + h * r.x[i];
        channel_factors(s, u, nch, F);
        const double cs = std::cos(x * u), sn = std::sin(x * u);
        for (int ch = 0; ch < nch; ++ch) {
            const double f = F[ch].real() * cs + F[ch].imag() * sn;
            p.k[ch] += r.wk[i] * f;
            g[ch] += r.wg[i] * f;
            p.l1[ch] += r.wk[i] * std::abs(f);
        }
    }
    for (int ch = 0; ch < nch; ++ch) {
        p.k[ch] *= h;
        p.l1[ch] *= h;
        p.err[ch] = std::abs(p.k[ch] - h * g[ch]);
    }
    return p;
}

}  // namespace

bool tail_density(double alpha, double beta, double x, DensityOrder order, DensityEval& out) {
    if (std::abs(alpha - 1.0) < 1e-3) return false;
    if (std::abs(tail_argument(alpha, beta, x)) < kTailThreshold) return false;
    if (order == DensityOrder::Value) {
        double v = 0.0;
        if (!tail_series<double>(x, alpha, beta, v)) return false;
        out = DensityEval{};
        out.value = v;
        return true;
    }
    Jet3 j;
    if (!tail_series<Jet3>(Jet3::variable(x, 0), Jet3::variable(alpha, 1), Jet3::variable(beta, 2), j))
        return false;
    out = from_jet(j);
    return true;
}

DensityEval pdf_adaptive(double alpha, double beta, double x, DensityOrder order) {
    const Shape s = make_shape(alpha, beta);
    const int nch = channel_count(order);
    const double U = inversion_cutoff(alpha);

    std::vector<Panel> panels;
    // Geometric panels resolve the log-type behaviour of the integrand at u = 0.
    constexpr int kGeometric = 40;
    const double u0 = std::ldexp(1.0, -kGeometric);
    for (int k = kGeometric - 1; k >= 0; --k)
        panels.push_back(eval_panel(s, x, nch, std::ldexp(1.0, -k - 1), std::ldexp(1.0, -k)));
    const double width = std::min(1.0, 2.0 * pi / std::max(std::abs(x), 1e-300));
    for (double a = 1.0; a < U; a += width) panels.push_back(eval_panel(s, x, nch, a, a + width));

    std::array<double, kMaxChannels> total{}, err{}, l1{};
    auto recompute = [&] {
        total.fill(0.0);
        err.fill(0.0);
        l1.fill(0.0);
        // On [0, u0] the value channel integrand is 1 to within u0^alpha; the others vanish.
        total[0] = u0;
        for (const Panel& p : panels)
            for (int c = 0; c < nch; ++c) {
                total[c] += p.k[c];
                err[c] += p.err[c];
                l1[c] += p.l1[c];
            }
    };
    recompute();

    auto targets = [&] {
        std::array<double, kMaxChannels> tg{};
        for (int c = 0; c < nch; ++c)
            tg[c] = std::max(kAdaptiveRelTol * std::abs(total[c]), kAdaptiveAbsFloor * l1[c]) + 1e-300;
        return tg;
    };
    auto score = [&](const Panel& p, const std::array<double, kMaxChannels>& tg) {
        double sc = 0.0;
        for (int c = 0; c < nch; ++c) sc = std::max(sc, p.err[c] / tg[c]);
        return sc;
    };

    while (true) {
        const auto tg = targets();
        bool ok = true;
        for (int c = 0; c < nch; ++c) ok = ok && err[c] <= tg[c];
        if (ok) break;
        if (panels.size() >= kPanelBudget)
            throw QuadratureError("density quadrature did not converge at alpha=" + std::to_string(alpha) +
                                  " beta=" + std::to_string(beta) + " x=" + std::to_string(x));
        // Split the worst panels in one sweep; cheap relative to evaluating them.
        std::vector<std::pair<double, std::size_t>> order_idx;
        order_idx.reserve(panels.size());
        for (std::size_t i = 0; i < panels.size(); ++i) order_idx.emplace_back(score(panels[i], tg), i);
        const std::size_t nsplit = std::max<std::size_t>(1, panels.size() / 8);
        std::partial_sort(order_idx.begin(), order_idx.begin() + std::min(nsplit, order_idx.size()),
                          order_idx.end(), std::greater<>());
        std::vector<Panel> added;
        for (std::size_t m = 0; m < nsplit && m < order_idx.size(); ++m) {
            if (order_idx[m].first <= 1.0 / double(panels.size())) break;
            Panel& p = panels[order_idx[m].second];
            const double mid = 0.5 * (p.a + p.b);
            Panel right = eval_panel(s, x, nch, mid, p.b);
            p = eval_panel(s, x, nch, p.a, mid);
            added.push_back(right);
        }
        if (added.empty()) break;
        panels.insert(panels.end(), added.begin(), added.end());
        recompute();
    }

    DensityEval e;
    for (int c = 0; c < nch; ++c) assign_channel(e, c, total[c] / pi);
    return e;
}

}  // namespace detail

std::complex<double> char_fn(const StableParams& p, double u) {
    if (u == 0.0) return {1.0, 0.0};
    const double s = p.sigma * std::abs(u);
    const double sg = u > 0.0 ? 1.0 : -1.0;
    double re, im;
    if (std::abs(p.alpha - 1.0) < 1e-8) {
        re = -s;
        im = -p.beta * sg * (2.0 / pi) * s * std::log(s);
    } else {
        const detail::Shape sh = detail::make_shape(p.alpha, p.beta);
        double G, G1, G2;
        detail::g_terms(sh, s, G, G1, G2);
        re = -std::pow(s, p.alpha);
        im = p.beta * sg * s * G;
    }
    return std::exp(std::complex<double>(re, im + p.mu * u));
}

DensityEval pdf(double alpha, double beta, double x, DensityOrder order) {
    require(std::isfinite(alpha) && alpha > 0.5 && alpha < 2.0, "pdf: alpha must lie in (0.5, 2)");
    require(std::isfinite(beta) && beta > -1.0 && beta < 1.0, "pdf: beta must lie in (-1, 1)");
    require(std::isfinite(x), "pdf: x must be finite");
    DensityEval e;
    if (detail::tail_density(alpha, beta, x, order, e)) return e;
    return detail::pdf_adaptive(alpha, beta, x, order);
}

double sample_one(const StableParams& p, RngStream& rng) {
    const double V = pi * (rng.uniform() - 0.5);
    const double W = rng.exponential();
    if (std::abs(p.alpha - 1.0) < 1e-8) {
        const double pb = pi / 2.0 + p.beta * V;
        const double z = (2.0 / pi) * (pb * std::tan(V) - p.beta * std::log((pi / 2.0) * W * std::cos(V) / pb));
        return p.sigma * z + p.mu;
    }
    const double a = p.alpha;
    const double t = std::tan(pi * a / 2.0);
    const double B = std::atan(p.beta * t) / a;
    const double S = std::pow(1.0 + p.beta * p.beta * t * t, 1.0 / (2.0 * a));
    const double z = S * std::sin(a * (V + B)) / std::pow(std::cos(V), 1.0 / a) *
                     std::pow(std::cos(V - a * (V + B)) / W, (1.0 - a) / a);
    // z follows the classical 1-parametrization; shift to S0.
    return p.sigma * (z - p.beta * t) + p.mu;
}

std::vector<double> sample(const StableParams& p, std::size_t count, RngStream& rng) {
    p.validate();
    std::vector<double> out(count);
    for (auto& v : out) v = sample_one(p, rng);
    return out;
}

double moment_m1(double q, double alpha) {
    if (!(q > 0.0 && q < std::min(1.0, alpha)))
        throw DomainError("moment_m1: need 0 < q < min(1, alpha)");
    return std::tgamma(1.0 - q / alpha) / (std::tgamma(1.0 - q) * std::cos(q * pi / 2.0));
}

const char* to_string(SkewAngleConvention c) {
    switch (c) {
        case SkewAngleConvention::Halved: return "halved";
        case SkewAngleConvention::Unhalved: return "unhalved";
        case SkewAngleConvention::OverAlpha: return "over-alpha";
    }
    return "?";
}

double effective_beta(double alpha, double beta) {
    return (2.0 - std::pow(2.0, alpha)) / (2.0 + std::pow(2.0, alpha)) * beta;
}

namespace {

// beta_eff * t_alpha, finite through alpha = 1.
double skew_product(double alpha, double beta) {
    const double eps = alpha - 1.0;
    if (std::abs(eps) < 1e-8) return beta * std::log(2.0) / pi;
    return effective_beta(alpha, beta) * std::tan(alpha * pi / 2.0);
}

}  // namespace

SkewMoments moment_m2(double q, double alpha, double beta, SkewAngleConvention convention) {
    if (!(q > 0.0 && q < alpha / 2.0)) throw DomainError("moment_m2: need 0 < q < alpha/2");
    if (!(beta >= -1.0 && beta <= 1.0)) throw DomainError("moment_m2: beta outside [-1, 1]");
    const double eta = std::atan(skew_product(alpha, beta));
    double k = 1.0;
    switch (convention) {
        case SkewAngleConvention::Halved: k = 0.5; break;
        case SkewAngleConvention::Unhalved: k = 1.0; break;
        case SkewAngleConvention::OverAlpha: k = 1.0 / alpha; break;
    }
    const double pref = std::tgamma(1.0 - q / alpha) / std::tgamma(1.0 - q) / std::pow(std::cos(eta), q / alpha);
    SkewMoments m;
    m.abs_moment = pref * std::cos(q * eta * k) / std::cos(q * pi / 2.0);
    m.signed_moment = pref * std::sin(q * eta * k) / std::sin(q * pi / 2.0);
    return m;
}

}  // namespace ssou
