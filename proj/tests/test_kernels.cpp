#include <catch2/catch_amalgamated.hpp>

#include "bpgs/forms.hpp"

using namespace bpgs;

namespace {

// O(N^2) reference: phi(r_i) = (2 pi / r_i) sum_j cw_j s_j f_j A(r_i, s_j)
// with the analytic inner integral A of each kernel, plus the same kink
// correction the scans apply.
std::vector<double> dense_convolve(const std::vector<double>& f,
                                   const RadialGrid& g, const Kernel& k) {
    const int N = g.N;
    std::vector<double> phi(N + 1, 0.0);
    auto A = [&](double r, double s) {
        switch (k.kind) {
            case KernelKind::Coulomb:
                return 2.0 * std::min(r, s);
            case KernelKind::Yukawa:
                return (std::exp(-k.mu * std::abs(r - s)) -
                        std::exp(-k.mu * (r + s))) / k.mu;
            case KernelKind::Exponential: {
                auto G = [&](double u) {
                    return (u / k.mu + 1.0 / (k.mu * k.mu)) * std::exp(-k.mu * u);
                };
                return G(std::abs(r - s)) - G(r + s);
            }
        }
        return 0.0;
    };
    for (int j = 0; j <= N; ++j) {
        // r = 0 column from the limit A(r,s)/r
        double lim = 0.0;
        switch (k.kind) {
            case KernelKind::Coulomb: lim = 2.0; break;
            case KernelKind::Yukawa: lim = 2.0 * std::exp(-k.mu * g.r[j]); break;
            case KernelKind::Exponential:
                lim = 2.0 * g.r[j] * std::exp(-k.mu * g.r[j]);
                break;
        }
        phi[0] += 2.0 * pi * g.cw[j] * g.r[j] * f[j] * lim;
    }
    for (int i = 1; i <= N; ++i) {
        double s = 0.0;
        for (int j = 0; j <= N; ++j)
            s += g.cw[j] * g.r[j] * f[j] * A(g.r[i], g.r[j]);
        phi[i] = 2.0 * pi * s / g.r[i];
        if (k.kind != KernelKind::Exponential)
            phi[i] -= pi * g.h * g.h / 3.0 * f[i];
    }
    return phi;
}

RadialField gaussian_density_field(GridPtr g, double width) {
    RadialField v = make_field(g);
    for (int i = 0; i <= g->N; ++i)
        v.v[i] = std::exp(-g->r[i] * g->r[i] / (2.0 * width * width));
    enforce_dirichlet(v);
    return v;
}

}  // namespace

TEST_CASE("kernel point values") {
    CHECK(kernel_value(coulomb_kernel(), 2.0) == 0.5);
    CHECK(kernel_value(yukawa_kernel(3.0), 1.0) == Catch::Approx(std::exp(-3.0)));
    CHECK(kernel_value(exponential_kernel(2.0), 0.0) == 1.0);
    CHECK_THROWS_AS(kernel_value(coulomb_kernel(), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(yukawa_kernel(0.0), std::invalid_argument);
    CHECK_THROWS_AS(yukawa_kernel(-1.0), std::invalid_argument);
}

TEST_CASE("K_beta values and limits") {
    const double beta = 0.3;
    CHECK(K_beta_value(beta, 1.0) ==
          Catch::Approx((1.0 - std::exp(-1.0 / beta)) / 1.0));
    // near the origin K_beta -> 1/beta
    CHECK(K_beta_value(beta, 1e-10) == Catch::Approx(K_beta_zero_limit(beta)));
    // large r: plain Coulomb decay
    CHECK(K_beta_value(beta, 50.0) == Catch::Approx(1.0 / 50.0));
    CHECK_THROWS_AS(K_beta_value(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(K_beta_value(beta, 0.0), std::invalid_argument);
}

TEST_CASE("O(N) scans equal the dense reference") {
    auto g = build_grid(20.0, 600);
    RadialField v = gaussian_density_field(g, 1.3);
    std::vector<double> f(g->N + 1);
    for (int i = 0; i <= g->N; ++i) f[i] = v.v[i] * v.v[i] * (1.0 + 0.2 * std::sin(g->r[i]));
    for (Kernel k : {coulomb_kernel(), yukawa_kernel(2.5), yukawa_kernel(10.0),
                     exponential_kernel(2.5)}) {
        const auto dense = dense_convolve(f, *g, k);
        RadialField fd = make_field(g);
        fd.v = f;
        const RadialField fast = radial_convolve(fd, k);
        for (int i = 0; i <= g->N; ++i) {
            const double scale = std::max(std::abs(dense[i]), 1e-30);
            CHECK(std::abs(fast.v[i] - dense[i]) / scale < 1e-12);
        }
    }
}

TEST_CASE("Coulomb potential of a Gaussian density matches closed form") {
    // f = exp(-r^2): (f * 1/|x|)(r) = pi^{3/2} erf(r)/r, limit 2 pi at r = 0
    auto g = build_grid(25.0, 4000);
    RadialField f = make_field(g);
    for (int i = 0; i <= g->N; ++i) f.v[i] = std::exp(-g->r[i] * g->r[i]);
    const RadialField phi = radial_convolve(f, coulomb_kernel());
    const double pi32 = std::pow(pi, 1.5);
    // the origin value carries the plain trapezoid O(h^2) error (the kink
    // correction is calibrated for r > 0)
    CHECK(phi.v[0] == Catch::Approx(2.0 * pi).epsilon(1e-5));
    for (int i : {40, 200, 800, 2400}) {
        const double r = g->r[i];
        CHECK(phi.v[i] == Catch::Approx(pi32 * std::erf(r) / r).epsilon(1e-8));
    }
}

TEST_CASE("screened scans flush to zero beyond the decay threshold") {
    auto g = build_grid(10.0, 64);
    RadialField f = gaussian_density_field(g, 1.0);
    const double mu = 1e5;  // mu * h >> 700
    const RadialField y = radial_convolve(f, yukawa_kernel(mu));
    for (double x : y.v) CHECK(x == 0.0);
}

TEST_CASE("potential_K_beta equals Coulomb minus Yukawa") {
    auto g = build_grid(15.0, 512);
    RadialField v = gaussian_density_field(g, 1.1);
    const double beta = 0.4;
    const RadialField phi = potential_K_beta(v, beta);
    std::vector<double> f(g->N + 1);
    for (int i = 0; i <= g->N; ++i) f[i] = v.v[i] * v.v[i];
    RadialField fd = make_field(g);
    fd.v = f;
    const RadialField c = radial_convolve(fd, coulomb_kernel());
    const RadialField y = radial_convolve(fd, yukawa_kernel(1.0 / beta));
    for (int i = 0; i <= g->N; ++i)
        CHECK(phi.v[i] == Catch::Approx(c.v[i] - y.v[i]).margin(1e-14));
    CHECK_THROWS_AS(potential_K_beta(v, -0.1), std::invalid_argument);
}
