// Energies, identity residuals, the Nehari-Pohozaev functional P, the
// Euler-Lagrange residual field, and the concentration-measure diagnostic.
//
// With k = k_beta (beta > 0) or c_coul (beta = 0):
//   energy     I(v)   = (a + b)/2 + k/4 - d/p
//   Nehari     N(v)   = (a + b) + k - d
//   Pohozaev   Poh(v) = a/2 + 3b/2 + 5k/4 + e/(4 beta) - 3d/p   (beta > 0)
//                       a/2 + 3b/2 + 5c/4 - 3d/p                (beta = 0)
//   P          P(v)   = 3a/2 + b/2 + 3k/4 - e/(4 beta) - (2p-3)/p d  (beta > 0)
//                       3a/2 + b/2 + 3c/4 - (2p-3)/p d               (beta = 0)
// and the algebraic identity P = 2 N - Poh holds for every field.

#pragma once

#include "bpgs/forms.hpp"

#include <utility>

namespace bpgs {

inline double energy(const FieldForms& F, const Params& prm) {
    return 0.5 * (F.a + F.b) + 0.25 * k_form(F, prm.beta) - F.d / prm.p;
}

inline double energy(const RadialField& v, const Params& prm) {
    return energy(compute_forms(v, prm), prm);
}

inline double nehari_residual(const FieldForms& F, const Params& prm) {
    return (F.a + F.b) + k_form(F, prm.beta) - F.d;
}

inline double nehari_residual(const RadialField& v, const Params& prm) {
    return nehari_residual(compute_forms(v, prm), prm);
}

inline double pohozaev_residual(const FieldForms& F, const Params& prm) {
    const double k = k_form(F, prm.beta);
    double r = 0.5 * F.a + 1.5 * F.b + 1.25 * k - 3.0 * F.d / prm.p;
    if (prm.beta > 0.0) r += F.e_beta / (4.0 * prm.beta);
    return r;
}

inline double pohozaev_residual(const RadialField& v, const Params& prm) {
    return pohozaev_residual(compute_forms(v, prm), prm);
}

inline double np_value(const FieldForms& F, const Params& prm) {
    const double k = k_form(F, prm.beta);
    double r = 1.5 * F.a + 0.5 * F.b + 0.75 * k -
               (2.0 * prm.p - 3.0) / prm.p * F.d;
    if (prm.beta > 0.0) r -= F.e_beta / (4.0 * prm.beta);
    return r;
}

inline double np_value(const RadialField& v, const Params& prm) {
    return np_value(compute_forms(v, prm), prm);
}

// -Delta v + v + phi v - |v|^{p-2} v with phi = v^2 * K_beta (Coulomb at
// beta = 0); Dirichlet row at r_N.
inline RadialField euler_lagrange_residual(const RadialField& v, const Params& prm,
                                           const RadialField* phi_in = nullptr) {
    const RadialField phi = phi_in ? *phi_in : potential_K_beta(v, prm.beta);
    RadialField F = laplacian_radial(v);
    const int N = v.grid->N;
    for (int i = 0; i <= N; ++i) {
        F.v[i] = -F.v[i] + v.v[i] + phi.v[i] * v.v[i] -
                 std::pow(std::abs(v.v[i]), prm.p - 2.0) * v.v[i];
    }
    F.v[N] = 0.0;
    return F;
}

inline double weighted_l2(const RadialField& f) {
    double s = 0.0;
    for (int i = 0; i <= f.grid->N; ++i) s += f.grid->w[i] * f.v[i] * f.v[i];
    return std::sqrt(s);
}

// Residuals raw and normalized by ||v||^2_{H^1} (the EL field norm is
// normalized by ||v||_{H^1}); acceptance thresholds use the normalized
// values.
struct IdentityReport {
    double nehari = 0.0;
    double pohozaev = 0.0;
    double np = 0.0;
    double el_l2 = 0.0;
    double beta = 0.0;
    double p = 0.0;
    double nehari_raw = 0.0;
    double pohozaev_raw = 0.0;
    double np_raw = 0.0;
    double el_l2_raw = 0.0;
    double h1_norm2 = 0.0;
};

inline IdentityReport identity_report(const RadialField& v, const Params& prm) {
    const FieldForms F = compute_forms(v, prm);
    IdentityReport rep;
    rep.beta = prm.beta;
    rep.p = prm.p;
    rep.h1_norm2 = F.a + F.b;
    rep.nehari_raw = nehari_residual(F, prm);
    rep.pohozaev_raw = pohozaev_residual(F, prm);
    rep.np_raw = np_value(F, prm);
    rep.el_l2_raw = weighted_l2(euler_lagrange_residual(v, prm));
    const double n2 = rep.h1_norm2 > 0.0 ? rep.h1_norm2 : 1.0;
    rep.nehari = rep.nehari_raw / n2;
    rep.pohozaev = rep.pohozaev_raw / n2;
    rep.np = rep.np_raw / n2;
    rep.el_l2 = rep.el_l2_raw / std::sqrt(n2);
    return rep;
}

inline std::string identity_report_json(const IdentityReport& r) {
    std::string s = "{";
    s += "\"nehari\": " + fmt17(r.nehari);
    s += ", \"pohozaev\": " + fmt17(r.pohozaev);
    s += ", \"np\": " + fmt17(r.np);
    s += ", \"el_l2\": " + fmt17(r.el_l2);
    s += ", \"beta\": " + fmt17(r.beta);
    s += ", \"p\": " + fmt17(r.p);
    s += "}";
    return s;
}

// Concentration-measure diagnostic as a cumulative profile
//   mu(B_r) = \int_{B_r} (p-3)/(2p-3) |grad v|^2 + (p-2)/(2p-3) v^2
//             + (p-3)/(2(2p-3)) (v^2 * 1/|x|) v^2.
// The Coulomb coefficient is the choice under which mu(R^3) equals the
// manifold energy decomposition, i.e. mu(R^3) = I_0(v) whenever
// P_0(v) = 0 (see README).
inline std::vector<std::pair<double, double>> concentration_profile(
        const RadialField& v, double p) {
    check_field(v);
    const auto& g = *v.grid;
    const auto dv = derivative(v);
    const auto f = detail::squared(v);
    const auto phi = detail::convolve_coulomb(f, g);
    const double c1 = (p - 3.0) / (2.0 * p - 3.0);
    const double c2 = (p - 2.0) / (2.0 * p - 3.0);
    const double c3 = (p - 3.0) / (2.0 * (2.0 * p - 3.0));
    std::vector<std::pair<double, double>> out(g.N + 1);
    double acc = 0.0;
    for (int i = 0; i <= g.N; ++i) {
        acc += g.w[i] * (c1 * dv[i] * dv[i] + c2 * f[i] + c3 * phi[i] * f[i]);
        out[i] = {g.r[i], acc};
    }
    return out;
}

}  // namespace bpgs
