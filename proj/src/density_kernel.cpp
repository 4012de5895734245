#include "ssou/density_kernel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "ssou/errors.hpp"

namespace ssou {

using std::numbers::pi;

namespace {

constexpr int kMom = 18;       // series terms on the innermost interval
constexpr int kGradedPanels = 4;
constexpr int kGradedNodes = 12;
constexpr int kUniformNodes = 16;
constexpr int kMomentDepth = 46;  // geometric panels used to build the moments
constexpr int kReanchor = 32;     // recompute exp(-i x a_p) exactly every this many panels
constexpr int kMaxCh = 10;

// Gauss-Legendre rule of order N on [lo, hi].
template <int N>
void gauss_legendre(double lo, double hi, std::array<double, N>& x, std::array<double, N>& w) {
    using boost::math::quadrature::gauss;
    const auto& a = gauss<double, N>::abscissa();
    const auto& wt = gauss<double, N>::weights();
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    int idx = 0;
    const int start = (N % 2 == 1) ? 1 : 0;
    for (int i = static_cast<int>(a.size()) - 1; i >= start; --i, ++idx) {
        x[idx] = c - h * a[i];
        w[idx] = h * wt[i];
    }
    if (N % 2 == 1) {
        x[idx] = c;
        w[idx] = h * wt[0];
        ++idx;
    }
    for (int i = start; i < static_cast<int>(a.size()); ++i, ++idx) {
        x[idx] = c + h * a[i];
        w[idx] = h * wt[i];
    }
}

// exp(-i phi) for |phi| <= ~1 by Taylor polynomials in phi^2.
inline void expi_small(double phi, double& re, double& im) {
    const double p2 = phi * phi;
    static constexpr double kInvFact[22] = {1.0,
                                            1.0,
                                            1.0 / 2.0,
                                            1.0 / 6.0,
                                            1.0 / 24.0,
                                            1.0 / 120.0,
                                            1.0 / 720.0,
                                            1.0 / 5040.0,
                                            1.0 / 40320.0,
                                            1.0 / 362880.0,
                                            1.0 / 3628800.0,
                                            1.0 / 39916800.0,
                                            1.0 / 479001600.0,
                                            1.0 / 6227020800.0,
                                            1.0 / 87178291200.0,
                                            1.0 / 1307674368000.0,
                                            1.0 / 20922789888000.0,
                                            1.0 / 355687428096000.0,
                                            1.0 / 6402373705728000.0,
                                            1.0 / 121645100408832000.0,
                                            1.0 / 2432902008176640000.0,
                                            1.0 / 51090942171709440000.0};
    const double c = 1.0 - p2 * (kInvFact[2] - p2 * (kInvFact[4] - p2 * (kInvFact[6] - p2 * (kInvFact[8] - p2 * (kInvFact[10] - p2 * (kInvFact[12] - p2 * (kInvFact[14] - p2 * (kInvFact[16] - p2 * (kInvFact[18] - p2 * kInvFact[20])))))))));
    const double s = phi * (1.0 - p2 * (kInvFact[3] - p2 * (kInvFact[5] - p2 * (kInvFact[7] - p2 * (kInvFact[9] - p2 * (kInvFact[11] - p2 * (kInvFact[13] - p2 * (kInvFact[15] - p2 * (kInvFact[17] - p2 * (kInvFact[19] - p2 * kInvFact[21]))))))))));
    re = c;
    im = -s;
}

// exp(-i phi) for |phi| <= ~8 via three squarings.
inline void expi_medium(double phi, double& re, double& im) {
    expi_small(phi * 0.125, re, im);
    for (int k = 0; k < 3; ++k) {
        const double r = re * re - im * im;
        im = 2.0 * re * im;
        re = r;
    }
}

}  // namespace

struct DensityKernel::Level {
    int nch = 0;
    double H = 0.0;
    std::array<double, kMom * kMaxCh> mre{}, mim{};
    std::array<double, kGradedNodes> s{};  // graded base nodes on [1/16, 1/8] times H
    std::vector<double> gre, gim;          // [c][panel][node]
    std::array<double, kUniformNodes> d{};  // uniform offsets on [0, H]
    int P = 0;
    std::vector<double> ure, uim;  // [c][panel][node]
};

DensityKernel::DensityKernel(double alpha, double beta)
    : alpha_(alpha), beta_(beta), shape_(detail::make_shape(alpha, beta)) {
    require(std::isfinite(alpha) && alpha > 0.5 && alpha < 2.0, "density kernel: alpha must lie in (0.5, 2)");
    require(std::isfinite(beta) && beta > -1.0 && beta < 1.0, "density kernel: beta must lie in (-1, 1)");
    cutoff_ = detail::inversion_cutoff(alpha);
    tail_ok_ = std::abs(alpha - 1.0) >= 1e-3;
    // Envelope slope alpha u^(alpha-1) and phase slope d/du (beta u G(u)) on [0, U].
    const double wenv = alpha * std::max(std::pow(cutoff_, alpha - 1.0), 1.0);
    double wosc = 0.0;
    double prev = 0.0;
    constexpr int kScan = 400;
    for (int k = 1; k <= kScan; ++k) {
        const double u = cutoff_ * k / kScan;
        double G, G1, G2;
        detail::g_terms(shape_, u, G, G1, G2);
        const double om = beta * u * G;
        if (k > 1) wosc = std::max(wosc, std::abs(om - prev) / (cutoff_ / kScan));
        prev = om;
    }
    w_ = 1.2 * (wenv + wosc) + 0.5;
    for (auto& row : levels_)
        for (auto& p : row) p.store(nullptr, std::memory_order_relaxed);
}

DensityKernel::~DensityKernel() = default;

int DensityKernel::level_for(double x) const {
    const double need = (std::abs(x) + w_) / 2.0;
    if (need <= 1.0) return 0;
    return static_cast<int>(std::ceil(std::log2(need)));
}

std::unique_ptr<DensityKernel::Level> DensityKernel::build_level(int j, int nch) const {
    auto L = std::make_unique<Level>();
    L->nch = nch;
    L->H = std::ldexp(4.0, -j);
    const double H = L->H;
    std::complex<double> F[kMaxCh];

    // Moments over [0, H/16] from geometric panels.
    {
        std::array<double, kGradedNodes> gx{}, gw{};
        gauss_legendre<kGradedNodes>(0.5, 1.0, gx, gw);
        const double R = H / 16.0;
        for (int k = 0; k < kMomentDepth; ++k) {
            const double scale = std::ldexp(R, -k);
            for (int i = 0; i < kGradedNodes; ++i) {
                const double u = scale * gx[i];
                const double w = scale * gw[i];
                detail::channel_factors(shape_, u, nch, F);
                double um = 1.0;
                for (int m = 0; m < kMom; ++m) {
                    for (int c = 0; c < nch; ++c) {
                        L->mre[c * kMom + m] += w * um * F[c].real();
                        L->mim[c * kMom + m] += w * um * F[c].imag();
                    }
                    um *= u;
                }
            }
        }
        // Remaining [0, R 2^-depth]: the value integrand is 1 there.
        L->mre[0] += std::ldexp(R, -kMomentDepth);
    }

    // Graded panels [H 2^(k-4), H 2^(k-3)], k = 0..3.
    {
        std::array<double, kGradedNodes> gx{}, gw{};
        gauss_legendre<kGradedNodes>(1.0 / 16.0, 1.0 / 8.0, gx, gw);
        const int nodes = kGradedPanels * kGradedNodes;
        L->gre.assign(static_cast<std::size_t>(nch) * nodes, 0.0);
        L->gim.assign(static_cast<std::size_t>(nch) * nodes, 0.0);
        for (int i = 0; i < kGradedNodes; ++i) L->s[i] = H * gx[i];
        for (int k = 0; k < kGradedPanels; ++k)
            for (int i = 0; i < kGradedNodes; ++i) {
                const double u = std::ldexp(H * gx[i], k);
                const double w = std::ldexp(H * gw[i], k);
                detail::channel_factors(shape_, u, nch, F);
                for (int c = 0; c < nch; ++c) {
                    L->gre[c * nodes + k * kGradedNodes + i] = w * F[c].real();
                    L->gim[c * nodes + k * kGradedNodes + i] = w * F[c].imag();
                }
            }
    }

    // Uniform panels [H (p+1), H (p+2)].
    {
        std::array<double, kUniformNodes> ux{}, uw{};
        gauss_legendre<kUniformNodes>(0.0, 1.0, ux, uw);
        for (int i = 0; i < kUniformNodes; ++i) L->d[i] = H * ux[i];
        L->P = std::max(1, static_cast<int>(std::ceil((cutoff_ - H) / H)));
        const std::size_t nodes = static_cast<std::size_t>(L->P) * kUniformNodes;
        L->ure.assign(nch * nodes, 0.0);
        L->uim.assign(nch * nodes, 0.0);
        for (int p = 0; p < L->P; ++p)
            for (int i = 0; i < kUniformNodes; ++i) {
                const double u = H * (p + 1) + H * ux[i];
                detail::channel_factors(shape_, u, nch, F);
                for (int c = 0; c < nch; ++c) {
                    L->ure[c * nodes + p * kUniformNodes + i] = H * uw[i] * F[c].real();
                    L->uim[c * nodes + p * kUniformNodes + i] = H * uw[i] * F[c].imag();
                }
            }
    }
    return L;
}

const DensityKernel::Level& DensityKernel::level(int j, DensityOrder order) const {
    const int o = static_cast<int>(order);
    for (int k = o; k < 3; ++k)
        if (Level* p = levels_[k][j].load(std::memory_order_acquire)) return *p;
    std::lock_guard<std::mutex> lock(mutex_);
    for (int k = o; k < 3; ++k)
        if (Level* p = levels_[k][j].load(std::memory_order_acquire)) return *p;
    storage_.push_back(build_level(j, detail::channel_count(order)));
    Level* p = storage_.back().get();
    levels_[o][j].store(p, std::memory_order_release);
    return *p;
}

DensityEval DensityKernel::quadrature(double x, DensityOrder order) const {
    const int j = level_for(x);
    if (j > kMaxLevel)
        throw QuadratureError("density kernel: |x| = " + std::to_string(std::abs(x)) +
                              " beyond the finest quadrature level at alpha=" + std::to_string(alpha_));
    const Level& L = level(j, order);
    const int nch = detail::channel_count(order);
    double S[kMaxCh] = {};

    // Innermost interval: sum_m (-i x)^m / m! * M_m.
    {
        double pr = 1.0, pim = 0.0;
        for (int m = 0; m < kMom; ++m) {
            for (int c = 0; c < nch; ++c) S[c] += pr * L.mre[c * kMom + m] - pim * L.mim[c * kMom + m];
            // p *= (-i x) / (m + 1)
            const double f = x / (m + 1);
            const double nr = pim * f;
            const double ni = -pr * f;
            pr = nr;
            pim = ni;
        }
    }

    // Graded panels: base phases by Taylor, then squaring doubles the node.
    {
        constexpr int nodes = kGradedPanels * kGradedNodes;
        const std::size_t cs = static_cast<std::size_t>(nodes);
        double er[kGradedNodes], ei[kGradedNodes];
        for (int i = 0; i < kGradedNodes; ++i) expi_small(x * L.s[i], er[i], ei[i]);
        for (int k = 0; k < kGradedPanels; ++k) {
            if (k > 0)
                for (int i = 0; i < kGradedNodes; ++i) {
                    const double r = er[i] * er[i] - ei[i] * ei[i];
                    ei[i] = 2.0 * er[i] * ei[i];
                    er[i] = r;
                }
            for (int c = 0; c < nch; ++c) {
                const double* gr = &L.gre[c * cs + k * kGradedNodes];
                const double* gi = &L.gim[c * cs + k * kGradedNodes];
                double acc = 0.0;
                for (int i = 0; i < kGradedNodes; ++i) acc += gr[i] * er[i] - gi[i] * ei[i];
                S[c] += acc;
            }
        }
    }

    // Uniform panels: exp(-i x (a_p + d_i)) = exp(-i x a_p) exp(-i x d_i).
    {
        const double H = L.H;
        const std::size_t cs = static_cast<std::size_t>(L.P) * kUniformNodes;
        double dr[kUniformNodes], di[kUniformNodes];
        for (int i = 0; i < kUniformNodes; ++i) expi_medium(x * L.d[i], dr[i], di[i]);
        double Er, Ei;
        expi_medium(x * H, Er, Ei);
        double pr = 0.0, pim = 0.0;
        double zr[kUniformNodes], zi[kUniformNodes];
        for (int p = 0; p < L.P; ++p) {
            if (p % kReanchor == 0) {
                const double ph = x * H * (p + 1);
                pr = std::cos(ph);
                pim = -std::sin(ph);
            }
            for (int i = 0; i < kUniformNodes; ++i) {
                zr[i] = pr * dr[i] - pim * di[i];
                zi[i] = pr * di[i] + pim * dr[i];
            }
            for (int c = 0; c < nch; ++c) {
                const double* ur = &L.ure[c * cs + p * kUniformNodes];
                const double* ui = &L.uim[c * cs + p * kUniformNodes];
                double acc = 0.0;
                for (int i = 0; i < kUniformNodes; ++i) acc += ur[i] * zr[i] - ui[i] * zi[i];
                S[c] += acc;
            }
            const double nr = pr * Er - pim * Ei;
            pim = pr * Ei + pim * Er;
            pr = nr;
        }
    }

    DensityEval e;
    double* fields[kMaxCh] = {&e.value,    &e.d_x,      &e.d_alpha,      &e.d_beta,      &e.d_xx,
                              &e.d_xalpha, &e.d_xbeta, &e.d_alphaalpha, &e.d_alphabeta, &e.d_betabeta};
    for (int c = 0; c < nch; ++c) *fields[c] = S[c] / pi;
    return e;
}

DensityEval DensityKernel::eval(double x, DensityOrder order) const {
    if (tail_ok_ && std::abs(detail::tail_argument(alpha_, beta_, x)) >= detail::kTailThreshold) {
        DensityEval e;
        if (detail::tail_density(alpha_, beta_, x, order, e)) return e;
    }
    return quadrature(x, order);
}

void DensityKernel::eval_batch(const double* x, std::size_t n, DensityOrder order, DensityEval* out) const {
    const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(static) if (nn >= 256)
    for (long long i = 0; i < nn; ++i) out[i] = eval(x[i], order);
}

void DensityKernel::eval_batch_serial(const double* x, std::size_t n, DensityOrder order,
                                      DensityEval* out) const {
    for (std::size_t i = 0; i < n; ++i) out[i] = eval(x[i], order);
}

std::shared_ptr<const DensityKernel> density_kernel(double alpha, double beta) {
    struct Entry {
        std::uint64_t a, b;
        std::shared_ptr<const DensityKernel> k;
    };
    constexpr std::size_t kCapacity = 16;
    thread_local std::vector<Entry> cache;
    const auto a = std::bit_cast<std::uint64_t>(alpha);
    const auto b = std::bit_cast<std::uint64_t>(beta);
    for (std::size_t i = 0; i < cache.size(); ++i)
        if (cache[i].a == a && cache[i].b == b) {
            if (i != 0) std::rotate(cache.begin(), cache.begin() + i, cache.begin() + i + 1);
            return cache.front().k;
        }
    auto k = std::make_shared<const DensityKernel>(alpha, beta);
    cache.insert(cache.begin(), Entry{a, b, k});
    if (cache.size() > kCapacity) cache.pop_back();
    return k;
}

}  // namespace ssou
