// The scalar forms feeding every functional: the three norms plus the
// Coulomb / Yukawa / exponential double integrals
//     c_coul = \int\int v(x)^2 v(y)^2 / |x-y|           dx dy
//     y_beta = \int\int e^{-|x-y|/beta} / |x-y| v^2 v^2 dx dy
//     e_beta = \int\int e^{-|x-y|/beta}          v^2 v^2 dx dy
// and the Bopp-Podolsky potential phi = v^2 * K_beta through the split
// K_beta = Coulomb - Yukawa(1/beta).

#pragma once

#include "bpgs/grid.hpp"
#include "bpgs/kernels.hpp"

namespace bpgs {

struct FieldForms {
    double a = 0.0;       // ||v||^2_{D^{1,2}}
    double b = 0.0;       // ||v||^2_{L^2}
    double d = 0.0;       // ||v||^p_{L^p}
    double c_coul = 0.0;
    double y_beta = 0.0;  // 0 when beta = 0
    double e_beta = 0.0;  // 0 when beta = 0
};

// k_beta = c_coul - y_beta is the K_beta double form; at beta = 0 the
// Yukawa part vanishes and k equals the Coulomb form.
inline double k_form(const FieldForms& F, double beta) {
    return beta > 0.0 ? F.c_coul - F.y_beta : F.c_coul;
}

namespace detail {

inline std::vector<double> squared(const RadialField& v) {
    std::vector<double> f(v.v.size());
    for (size_t i = 0; i < f.size(); ++i) f[i] = v.v[i] * v.v[i];
    return f;
}

inline double pair_with_density(const RadialGrid& g,
                                const std::vector<double>& phi,
                                const std::vector<double>& f) {
    double s = 0.0;
    for (int i = 0; i <= g.N; ++i) s += g.w[i] * phi[i] * f[i];
    return s;
}

}  // namespace detail

// phi = v^2 * K_beta (beta > 0) via the Coulomb - Yukawa split; at
// beta = 0 the pure Coulomb potential of v^2.
inline RadialField potential_K_beta(const RadialField& v, double beta) {
    if (beta < 0.0) throw std::invalid_argument("potential_K_beta: beta < 0");
    check_field(v);
    const auto f = detail::squared(v);
    RadialField phi = make_field(v.grid);
    phi.v = detail::convolve_coulomb(f, *v.grid);
    if (beta > 0.0) {
        const auto yk = detail::convolve_yukawa(f, *v.grid, 1.0 / beta);
        for (size_t i = 0; i < phi.v.size(); ++i) phi.v[i] -= yk[i];
    }
    return phi;
}

// Generic double form <phi_K[v^2], v^2> for one kernel.
inline double double_form(const RadialField& v, const Kernel& k) {
    check_field(v);
    const auto f = detail::squared(v);
    std::vector<double> phi;
    switch (k.kind) {
        case KernelKind::Coulomb:
            phi = detail::convolve_coulomb(f, *v.grid);
            break;
        case KernelKind::Yukawa:
            phi = detail::convolve_yukawa(f, *v.grid, k.mu);
            break;
        case KernelKind::Exponential:
            phi = detail::convolve_exponential(f, *v.grid, k.mu);
            break;
    }
    return detail::pair_with_density(*v.grid, phi, f);
}

// Fills the double forms for the given beta (y and e are zero at beta = 0,
// where their coefficients vanish in every formula).
inline FieldForms double_forms(const RadialField& v, double beta) {
    if (beta < 0.0) throw std::invalid_argument("double_forms: beta < 0");
    FieldForms F;
    F.c_coul = double_form(v, coulomb_kernel());
    if (beta > 0.0) {
        F.y_beta = double_form(v, yukawa_kernel(1.0 / beta));
        F.e_beta = double_form(v, exponential_kernel(1.0 / beta));
    }
    return F;
}

// All six forms at once.
inline FieldForms compute_forms(const RadialField& v, const Params& prm) {
    FieldForms F = double_forms(v, prm.beta);
    const Norms n = norms(v, prm.p);
    F.a = n.a;
    F.b = n.b;
    F.d = n.d;
    return F;
}

}  // namespace bpgs
