// The dilation v -> t^2 v(t .), the fibering energy t -> I(t^2 v(t .)),
// and the unique projection onto the Nehari-Pohozaev manifold.
//
// Under the dilation the scalar forms transform exactly:
//     a -> t^3 a,  b -> t b,  d -> t^{2p-3} d,
//     k_beta -> t^3 k_{t beta},  e_beta -> t^2 e_{t beta},
// so the fibering energy and its derivative are evaluated from the base
// forms of v plus fresh Yukawa/exponential forms at parameter t*beta; no
// interpolated dilation enters the projection loop.  The projection
// root-finds the sign change of
//     P(t) = (3/2) t^3 a + (1/2) t b + (3/4) t^3 k_{t beta}
//            - t^2 e_{t beta}/(4 beta) - ((2p-3)/p) t^{2p-3} d
// by bracketed bisection on [1e-6, 1e6].

#pragma once

#include "bpgs/functionals.hpp"

namespace bpgs {

namespace detail {

// Clamped cubic spline (zero slope at both ends, matching the even
// extension at r = 0 and the flat decayed tail at R_max) on the uniform
// grid; returns the nodal second derivatives.
inline std::vector<double> spline_second_derivs(const RadialGrid& g,
                                                const std::vector<double>& y) {
    const int N = g.N;
    const double h = g.h;
    std::vector<double> diag(N + 1), rhs(N + 1), m(N + 1);
    diag[0] = 2.0 * h;
    rhs[0] = 6.0 * ((y[1] - y[0]) / h);
    for (int i = 1; i < N; ++i) {
        diag[i] = 4.0 * h;
        rhs[i] = 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / h;
    }
    diag[N] = 2.0 * h;
    rhs[N] = 6.0 * (-(y[N] - y[N - 1]) / h);
    // Thomas elimination; off-diagonals are all h and the matrix is
    // strictly diagonally dominant.
    std::vector<double> cp(N + 1);
    cp[0] = h / diag[0];
    rhs[0] /= diag[0];
    for (int i = 1; i <= N; ++i) {
        const double den = diag[i] - h * cp[i - 1];
        cp[i] = h / den;
        rhs[i] = (rhs[i] - h * rhs[i - 1]) / den;
    }
    m[N] = rhs[N];
    for (int i = N - 1; i >= 0; --i) m[i] = rhs[i] - cp[i] * m[i + 1];
    return m;
}

inline double spline_eval(const RadialGrid& g, const std::vector<double>& y,
                          const std::vector<double>& m, double x) {
    const int N = g.N;
    int i = static_cast<int>(x / g.h);
    if (i < 0) i = 0;
    if (i >= N) i = N - 1;
    const double h = g.h;
    const double t = x - g.r[i];
    const double bcoef = (y[i + 1] - y[i]) / h - h * (2.0 * m[i] + m[i + 1]) / 6.0;
    const double ccoef = m[i] / 2.0;
    const double dcoef = (m[i + 1] - m[i]) / (6.0 * h);
    return y[i] + t * (bcoef + t * (ccoef + t * dcoef));
}

}  // namespace detail

// t^2 v(t r) by cubic interpolation onto the fixed grid; values beyond
// R_max are 0.
inline RadialField dilate(const RadialField& v, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("dilate: t must be positive");
    check_field(v);
    const auto& g = *v.grid;
    RadialField out = make_field(v.grid);
    if (t == 1.0) {
        out.v = v.v;
        enforce_dirichlet(out);
        return out;
    }
    const auto m = detail::spline_second_derivs(g, v.v);
    const double t2 = t * t;
    for (int i = 0; i <= g.N; ++i) {
        const double x = t * g.r[i];
        out.v[i] = x <= g.R_max ? t2 * detail::spline_eval(g, v.v, m, x) : 0.0;
    }
    enforce_dirichlet(out);
    return out;
}

namespace detail {

// Yukawa and exponential double forms of v at screening 1/(t*beta).
inline void ky_at(const RadialField& v, double beta, double t,
                  double& y, double& e) {
    const double mu = 1.0 / (t * beta);
    y = double_form(v, yukawa_kernel(mu));
    e = double_form(v, exponential_kernel(mu));
}

}  // namespace detail

// Fibering energy I_beta(t^2 v(t .)) from base forms, exact in t.
inline double fiber_energy(const RadialField& v, const Params& prm, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("fiber_energy: t must be positive");
    const FieldForms F = compute_forms(v, prm);
    const double t3 = t * t * t;
    double k = F.c_coul;
    if (prm.beta > 0.0) {
        double y, e;
        detail::ky_at(v, prm.beta, t, y, e);
        k = F.c_coul - y;
    }
    return 0.5 * t3 * F.a + 0.5 * t * F.b + 0.25 * t3 * k -
           std::pow(t, 2.0 * prm.p - 3.0) / prm.p * F.d;
}

struct FiberingResult {
    double t_star = 1.0;
    RadialField projected;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double np_at_t = 0.0;  // |P(t_star^2 v(t_star .))|, scalar evaluation
};

namespace detail {

inline double fiber_np(const RadialField& v, const FieldForms& F,
                       const Params& prm, double t) {
    const double t3 = t * t * t;
    double val = 1.5 * t3 * F.a + 0.5 * t * F.b -
                 (2.0 * prm.p - 3.0) / prm.p * std::pow(t, 2.0 * prm.p - 3.0) * F.d;
    if (prm.beta > 0.0) {
        double y, e;
        ky_at(v, prm.beta, t, y, e);
        val += 0.75 * t3 * (F.c_coul - y) - t * t * e / (4.0 * prm.beta);
    } else {
        val += 0.75 * t3 * F.c_coul;
    }
    return val;
}

}  // namespace detail

inline FiberingResult project_NP(const RadialField& v, const Params& prm) {
    check_field(v);
    const FieldForms F = compute_forms(v, prm);
    if (F.a + F.b <= 0.0)
        throw std::invalid_argument("project_NP: zero field");
    double lo = 1e-6, hi = 1e6;
    const double P_lo = detail::fiber_np(v, F, prm, lo);
    const double P_hi = detail::fiber_np(v, F, prm, hi);
    if (!(P_lo > 0.0 && P_hi < 0.0))
        throw NumericalError("project_NP: no sign change of P on [1e-6, 1e6]");
    for (int it = 0; it < 200 && hi - lo > 1e-13 * lo; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (detail::fiber_np(v, F, prm, mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    FiberingResult res;
    res.t_star = 0.5 * (lo + hi);
    res.bracket_lo = lo;
    res.bracket_hi = hi;
    res.np_at_t = std::abs(detail::fiber_np(v, F, prm, res.t_star));
    res.projected = dilate(v, res.t_star);
    return res;
}

// Projection parameter of a computed SBP ground state onto P_0.
inline double t_beta_of(const RadialField& v_beta, double p) {
    return project_NP(v_beta, Params{p, 0.0}).t_star;
}

}  // namespace bpgs
