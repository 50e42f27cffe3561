// Closed-form radial convolutions against the Coulomb, Yukawa, and
// pure-exponential kernels.
//
// The exact radial reduction
//     (f * g)(r) = (2 pi / r) \int_0^inf s f(s) A(r, s) ds
// with A(r, s) = \int_{|r-s|}^{r+s} t g(t) dt has analytic inner
// integrals for all three kernels:
//     Coulomb        A = 2 min(r, s)
//     Yukawa(mu)     A = (e^{-mu|r-s|} - e^{-mu(r+s)}) / mu
//     Exponential(mu) A = G(mu, |r-s|) - G(mu, r+s),
//                      G(mu, u) = (u/mu + 1/mu^2) e^{-mu u}
// Each convolution is evaluated in O(N) with prefix/suffix scans whose
// decay factors e^{-mu h} keep every partial sum bounded.
//
// The trapezoid rule applied across the |r-s| kink of the Coulomb and
// Yukawa inner integrals leaves a local O(h^2) defect; the calibrated
// correction phi_i -= (pi h^2 / 3) f_i removes it (the exponential
// kernel's A is C^1 at s = r, so no correction there).

#pragma once

#include "bpgs/grid.hpp"

namespace bpgs {

enum class KernelKind { Coulomb, Yukawa, Exponential };

struct Kernel {
    KernelKind kind = KernelKind::Coulomb;
    double mu = 0.0;  // inverse screening length; mu = 1/beta in the BP split
};

inline Kernel coulomb_kernel() { return {KernelKind::Coulomb, 0.0}; }

inline Kernel yukawa_kernel(double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("Yukawa kernel needs mu > 0");
    return {KernelKind::Yukawa, mu};
}

inline Kernel exponential_kernel(double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("Exponential kernel needs mu > 0");
    return {KernelKind::Exponential, mu};
}

inline double kernel_value(const Kernel& k, double r) {
    switch (k.kind) {
        case KernelKind::Coulomb:
            if (!(r > 0.0)) throw std::invalid_argument("Coulomb kernel at r = 0");
            return 1.0 / r;
        case KernelKind::Yukawa:
            if (!(r > 0.0)) throw std::invalid_argument("Yukawa kernel at r = 0");
            return std::exp(-k.mu * r) / r;
        case KernelKind::Exponential:
            return std::exp(-k.mu * r);
    }
    throw std::invalid_argument("unknown kernel");
}

// Bopp-Podolsky kernel K_beta(r) = (1 - e^{-r/beta}) / r for r > 0.
inline double K_beta_value(double beta, double r) {
    if (!(beta > 0.0)) throw std::invalid_argument("K_beta needs beta > 0");
    if (!(r > 0.0)) throw std::invalid_argument("K_beta at r = 0; use K_beta_zero_limit");
    return -std::expm1(-r / beta) / r;
}

// K_beta(0+) = 1/beta.
inline double K_beta_zero_limit(double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("K_beta needs beta > 0");
    return 1.0 / beta;
}

namespace detail {

// Scan cutoff: when mu*h exceeds this, e^{-mu h} underflows and every
// screened contribution sits below round-off; flush to zero.
inline constexpr double scan_flush_threshold = 700.0;

inline std::vector<double> convolve_coulomb(const std::vector<double>& f,
                                            const RadialGrid& g) {
    const int N = g.N;
    std::vector<double> phi(N + 1);
    // near_i = sum_{j<=i} c_j s_j^2 f_j, far_i = sum_{j>i} c_j s_j f_j
    double far_all = 0.0;
    for (int j = 0; j <= N; ++j) far_all += g.cw[j] * g.r[j] * f[j];
    phi[0] = 4.0 * pi * far_all;
    double near = g.cw[0] * g.r[0] * g.r[0] * f[0];
    double far = far_all - g.cw[0] * g.r[0] * f[0];
    for (int i = 1; i <= N; ++i) {
        near += g.cw[i] * g.r[i] * g.r[i] * f[i];
        far -= g.cw[i] * g.r[i] * f[i];
        phi[i] = 4.0 * pi * (near / g.r[i] + far) - (pi * g.h * g.h / 3.0) * f[i];
    }
    return phi;
}

inline std::vector<double> convolve_yukawa(const std::vector<double>& f,
                                           const RadialGrid& g, double mu) {
    const int N = g.N;
    std::vector<double> phi(N + 1, 0.0);
    if (mu * g.h > scan_flush_threshold) return phi;
    const double dec = std::exp(-mu * g.h);
    std::vector<double> sf(N + 1), P(N + 1), Q(N + 1);
    for (int j = 0; j <= N; ++j) sf[j] = g.cw[j] * g.r[j] * f[j];
    // P_i = sum_{j<=i} sf_j e^{-mu (r_i - s_j)}, Q_i = sum_{j>i} sf_j e^{-mu (s_j - r_i)}
    P[0] = sf[0];
    for (int i = 1; i <= N; ++i) P[i] = P[i - 1] * dec + sf[i];
    Q[N] = 0.0;
    for (int i = N - 1; i >= 0; --i) Q[i] = dec * (sf[i + 1] + Q[i + 1]);
    // cross term from the -e^{-mu (r+s)} piece of A
    double T = 0.0;
    for (int j = 0; j <= N; ++j) T += sf[j] * std::exp(-mu * g.r[j]);
    double phi0 = 0.0;
    for (int j = 0; j <= N; ++j) phi0 += sf[j] * std::exp(-mu * g.r[j]);
    phi[0] = 4.0 * pi * phi0;
    for (int i = 1; i <= N; ++i) {
        const double emr = std::exp(-mu * g.r[i]);
        phi[i] = (2.0 * pi / (mu * g.r[i])) * (P[i] + Q[i] - emr * T) -
                 (pi * g.h * g.h / 3.0) * f[i];
    }
    return phi;
}

inline std::vector<double> convolve_exponential(const std::vector<double>& f,
                                                const RadialGrid& g, double mu) {
    const int N = g.N;
    std::vector<double> phi(N + 1, 0.0);
    if (mu * g.h > scan_flush_threshold) return phi;
    const double dec = std::exp(-mu * g.h);
    std::vector<double> sf(N + 1), s2f(N + 1);
    for (int j = 0; j <= N; ++j) {
        sf[j] = g.cw[j] * g.r[j] * f[j];
        s2f[j] = sf[j] * g.r[j];
    }
    std::vector<double> P1(N + 1), P2(N + 1), Q1(N + 1), Q2(N + 1);
    P1[0] = sf[0];
    P2[0] = s2f[0];
    for (int i = 1; i <= N; ++i) {
        P1[i] = P1[i - 1] * dec + sf[i];
        P2[i] = P2[i - 1] * dec + s2f[i];
    }
    Q1[N] = Q2[N] = 0.0;
    for (int i = N - 1; i >= 0; --i) {
        Q1[i] = dec * (sf[i + 1] + Q1[i + 1]);
        Q2[i] = dec * (s2f[i + 1] + Q2[i + 1]);
    }
    double T1 = 0.0, T2 = 0.0, phi0 = 0.0;
    for (int j = 0; j <= N; ++j) {
        const double e = std::exp(-mu * g.r[j]);
        T1 += sf[j] * e;
        T2 += s2f[j] * e;
        phi0 += s2f[j] * e;
    }
    phi[0] = 4.0 * pi * phi0;
    const double inv_mu = 1.0 / mu, inv_mu2 = inv_mu * inv_mu;
    for (int i = 1; i <= N; ++i) {
        const double r = g.r[i];
        const double emr = std::exp(-mu * r);
        // sum over s <= r of sf G(r - s): (r/mu + 1/mu^2) P1 - P2/mu
        const double near = (r * inv_mu + inv_mu2) * P1[i] - P2[i] * inv_mu;
        // sum over s > r of sf G(s - r): Q2/mu + Q1/mu^2 - r Q1/mu
        const double far = Q2[i] * inv_mu + Q1[i] * inv_mu2 - r * Q1[i] * inv_mu;
        // -sum sf G(r + s)
        const double cross = emr * ((r * inv_mu + inv_mu2) * T1 + T2 * inv_mu);
        phi[i] = (2.0 * pi / r) * (near + far - cross);
    }
    return phi;
}

}  // namespace detail

// Convolution of a radial density f with one of the three kernels,
// evaluated at every grid node in O(N).
inline RadialField radial_convolve(const RadialField& f, const Kernel& k) {
    check_field(f);
    if (k.kind != KernelKind::Coulomb && !(k.mu > 0.0))
        throw std::invalid_argument("radial_convolve: screened kernel needs mu > 0");
    RadialField out = make_field(f.grid);
    switch (k.kind) {
        case KernelKind::Coulomb:
            out.v = detail::convolve_coulomb(f.v, *f.grid);
            break;
        case KernelKind::Yukawa:
            out.v = detail::convolve_yukawa(f.v, *f.grid, k.mu);
            break;
        case KernelKind::Exponential:
            out.v = detail::convolve_exponential(f.v, *f.grid, k.mu);
            break;
    }
    return out;
}

}  // namespace bpgs
