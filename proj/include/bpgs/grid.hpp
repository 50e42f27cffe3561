// Radial grids, quadrature, differential operators, and the basic norms
// used by every functional in the library.
//
// The domain is [0, R_max] with N+1 uniformly spaced nodes r_i = i*h.
// Quadrature is trapezoidal in r with the 3-D radial factor 4*pi*r^2
// folded into the weights, so sums over w[] approximate integrals of
// radial functions over the ball B_{R_max} in R^3.

#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bpgs {

inline constexpr double pi = 3.14159265358979323846;

// Numerical failures (no convergence, degenerate iterates, failed checks).
// Distinct from std::invalid_argument, which marks precondition/usage
// violations; the CLI maps the two onto different exit codes.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Formats a double with 17 significant digits, enough for bit-exact
// decimal round trips.
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
}

struct RadialGrid {
    int N = 0;           // node count minus one; nodes are 0..N
    double R_max = 0.0;  // truncation radius
    double h = 0.0;      // spacing
    std::vector<double> r;   // nodes r_i = i*h
    std::vector<double> cw;  // 1-D trapezoid weights (h, with h/2 at both ends)
    std::vector<double> w;   // 3-D weights 4*pi*r_i^2*cw_i; w[0] = 0
};

using GridPtr = std::shared_ptr<const RadialGrid>;

inline GridPtr build_grid(double R_max, int N) {
    if (!(R_max > 0.0))
        throw std::invalid_argument("build_grid: R_max must be positive");
    if (N < 16)
        throw std::invalid_argument("build_grid: N must be at least 16");
    auto g = std::make_shared<RadialGrid>();
    g->N = N;
    g->R_max = R_max;
    g->h = R_max / N;
    g->r.resize(N + 1);
    g->cw.assign(N + 1, g->h);
    g->cw[0] = g->h / 2.0;
    g->cw[N] = g->h / 2.0;
    g->w.resize(N + 1);
    for (int i = 0; i <= N; ++i) {
        g->r[i] = i * g->h;
        g->w[i] = 4.0 * pi * g->r[i] * g->r[i] * g->cw[i];
    }
    return g;
}

struct RadialField {
    GridPtr grid;
    std::vector<double> v;  // samples v(r_i); v[N] = 0 (Dirichlet truncation)
};

inline RadialField make_field(GridPtr g) {
    RadialField f;
    f.grid = std::move(g);
    f.v.assign(f.grid->N + 1, 0.0);
    return f;
}

inline void enforce_dirichlet(RadialField& f) { f.v.back() = 0.0; }

inline void check_field(const RadialField& f) {
    if (!f.grid || f.v.size() != static_cast<size_t>(f.grid->N + 1))
        throw std::invalid_argument("invalid RadialField");
    for (double x : f.v)
        if (!std::isfinite(x))
            throw std::invalid_argument("RadialField contains non-finite values");
}

inline void check_same_grid(const RadialField& a, const RadialField& b) {
    if (!a.grid || !b.grid || a.grid->N != b.grid->N ||
        a.grid->R_max != b.grid->R_max)
        throw std::invalid_argument("fields live on different grids");
}

struct Params {
    double p = 4.0;    // exponent, 3 < p < 6
    double beta = 0.0; // beta >= 0; beta = 0 selects the Schroedinger-Poisson limit
};

inline void validate_params(const Params& prm) {
    if (!(prm.p > 3.0 && prm.p < 6.0))
        throw std::invalid_argument("Params: p must lie in (3, 6)");
    if (!(prm.beta >= 0.0))
        throw std::invalid_argument("Params: beta must be nonnegative");
}

// Second-order central difference; v'(0) = 0 by even symmetry, one-sided
// at the outer endpoint.
inline std::vector<double> derivative(const RadialField& f) {
    const auto& g = *f.grid;
    const int N = g.N;
    const double h = g.h;
    std::vector<double> dv(N + 1);
    dv[0] = 0.0;
    for (int i = 1; i < N; ++i) dv[i] = (f.v[i + 1] - f.v[i - 1]) / (2.0 * h);
    dv[N] = (3.0 * f.v[N] - 4.0 * f.v[N - 1] + f.v[N - 2]) / (2.0 * h);
    return dv;
}

// Radial Laplacian v'' + 2 v'/r with the r = 0 limit 3 v''(0) via the
// compact stencil 6 (v1 - v0)/h^2; Dirichlet value at r_N.
inline RadialField laplacian_radial(const RadialField& f) {
    check_field(f);
    const auto& g = *f.grid;
    const int N = g.N;
    const double h2 = g.h * g.h;
    RadialField out = make_field(f.grid);
    out.v[0] = 6.0 * (f.v[1] - f.v[0]) / h2;
    for (int i = 1; i < N; ++i) {
        out.v[i] = (f.v[i + 1] - 2.0 * f.v[i] + f.v[i - 1]) / h2 +
                   (f.v[i + 1] - f.v[i - 1]) / g.h / g.r[i];
    }
    out.v[N] = 0.0;
    return out;
}

struct Norms {
    double a = 0.0;  // ||v||^2 in D^{1,2}
    double b = 0.0;  // ||v||^2 in L^2
    double d = 0.0;  // ||v||^p in L^p
};

inline Norms norms(const RadialField& f, double p) {
    const auto& g = *f.grid;
    const auto dv = derivative(f);
    Norms n;
    for (int i = 0; i <= g.N; ++i) {
        n.a += g.w[i] * dv[i] * dv[i];
        n.b += g.w[i] * f.v[i] * f.v[i];
        n.d += g.w[i] * std::pow(std::abs(f.v[i]), p);
    }
    return n;
}

inline double h1_norm2(const RadialField& f) {
    const auto n = norms(f, 4.0);
    return n.a + n.b;
}

inline double h1_distance(const RadialField& a, const RadialField& b) {
    check_same_grid(a, b);
    RadialField diff = make_field(a.grid);
    for (size_t i = 0; i < a.v.size(); ++i) diff.v[i] = a.v[i] - b.v[i];
    return std::sqrt(h1_norm2(diff));
}

// ---- solution file format ----
// Header "# R_max=<val> N=<val> p=<val> beta=<val>" followed by one
// "r value" pair per line, 17 significant digits.

inline std::string serialize_solution(const RadialField& f, const Params& prm) {
    const auto& g = *f.grid;
    std::ostringstream os;
    os << "# R_max=" << fmt17(g.R_max) << " N=" << g.N
       << " p=" << fmt17(prm.p) << " beta=" << fmt17(prm.beta) << "\n";
    for (int i = 0; i <= g.N; ++i)
        os << fmt17(g.r[i]) << " " << fmt17(f.v[i]) << "\n";
    return os.str();
}

inline void write_solution(const std::string& path, const RadialField& f,
                           const Params& prm) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << serialize_solution(f, prm);
}

inline RadialField read_solution(const std::string& path, Params& prm) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::string header;
    std::getline(is, header);
    double R_max = 0.0, p = 0.0, beta = -1.0;
    int N = 0;
    if (std::sscanf(header.c_str(), "# R_max=%lf N=%d p=%lf beta=%lf",
                    &R_max, &N, &p, &beta) != 4)
        throw std::runtime_error("malformed solution header in " + path);
    auto g = build_grid(R_max, N);
    RadialField f = make_field(g);
    for (int i = 0; i <= N; ++i) {
        double r = 0.0, val = 0.0;
        if (!(is >> r >> val))
            throw std::runtime_error("truncated solution file " + path);
        f.v[i] = val;
    }
    enforce_dirichlet(f);
    check_field(f);
    prm.p = p;
    prm.beta = beta;
    return f;
}

}  // namespace bpgs
