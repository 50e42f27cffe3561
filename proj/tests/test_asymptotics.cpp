#include <catch2/catch_amalgamated.hpp>

#include "bpgs/asymptotics.hpp"

#include <algorithm>
#include <random>

using namespace bpgs;

namespace {

RadialField gaussian_field(GridPtr g, double A, double w) {
    RadialField v = make_field(g);
    for (int i = 0; i <= g->N; ++i)
        v.v[i] = A * std::exp(-g->r[i] * g->r[i] / (2.0 * w * w));
    enforce_dirichlet(v);
    return v;
}

}  // namespace

TEST_CASE("sweep CSV header and record formatting") {
    CHECK(std::string(sweep_csv_header()) ==
          "beta,m_beta,t_beta,tbar_beta,h1_dist,i0_projected,"
          "lemma34_lhs,lemma34_rhs,h1_bound_slack");
    SweepRecord r;
    r.beta = 0.5;
    r.m_beta = 1.0 / 3.0;
    const std::string line = sweep_record_csv(r);
    CHECK(line.rfind("0.5,0.33333333333333331,", 0) == 0);
    CHECK(std::count(line.begin(), line.end(), ',') == 8);
    const std::string js = sweep_record_json(r);
    CHECK(js.find("\"i0_projected\": ") != std::string::npos);
}

TEST_CASE("vanishing-term inequality on smooth fields") {
    auto g = build_grid(25.0, 1024);
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> amp(0.5, 2.0), wid(0.8, 2.0);
    for (int c = 0; c < 20; ++c) {
        RadialField v = gaussian_field(g, amp(rng), wid(rng));
        const double beta = std::pow(2.0, -static_cast<double>(rng() % 5));
        auto [lhs, rhs] = check_vanishing_term(v, beta);
        CHECK(lhs > 0.0);
        CHECK(rhs > lhs);
    }
    CHECK_THROWS_AS(check_vanishing_term(gaussian_field(g, 1.0, 1.0), 0.0),
                    std::invalid_argument);
}

TEST_CASE("vanishing term decays along beta halving") {
    auto g = build_grid(25.0, 1024);
    // stay above beta = 1/128 so the screening length resolves on the grid
    RadialField v = gaussian_field(g, 1.3, 1.1);
    double prev = std::numeric_limits<double>::infinity();
    for (double beta = 1.0; beta >= 1.0 / 128.0; beta *= 0.5) {
        const double lhs = check_vanishing_term(v, beta).first;
        CHECK(lhs > 0.0);
        CHECK(lhs < prev);
        prev = lhs;
    }
    CHECK(prev < 0.05);
}

TEST_CASE("limsup bound produces an interior projection parameter") {
    auto g = build_grid(30.0, 1024);
    const SolveReport ref =
        solve_ground_state(Params{4.0, 0.0}, g, SolveOptions{});
    auto [tbar, ub] = check_limsup_bound(ref.v, 0.5, 4.0);
    CHECK(tbar > 0.0);
    CHECK(tbar < 1.0);  // screening weakens the nonlocal repulsion
    CHECK(ub > 0.0);
}

TEST_CASE("run_sweep validates the beta schedule") {
    auto g = build_grid(20.0, 256);
    SolveOptions o;
    CHECK_THROWS_AS(run_sweep(4.0, {}, g, o), std::invalid_argument);
    CHECK_THROWS_AS(run_sweep(4.0, {0.5, 1.0}, g, o), std::invalid_argument);
    CHECK_THROWS_AS(run_sweep(4.0, {1.0, -0.5}, g, o), std::invalid_argument);
}

TEST_CASE("aborted sweep preserves completed records") {
    auto g = build_grid(20.0, 256);
    SolveOptions o;
    o.tol_el = 1e-30;  // unreachable: the reference solve must fail
    o.max_iters = 40;
    int fired = 0;
    try {
        run_sweep(4.0, {1.0, 0.5}, g, o, [&](const SweepRecord&) { ++fired; });
        FAIL("expected SweepAborted");
    } catch (const SweepAborted& e) {
        CHECK(e.partial.records.empty());
        CHECK(fired == 0);
    }
}

TEST_CASE("convergence_report marks short sweeps as insufficient data") {
    std::vector<SweepRecord> rs(1);
    rs[0].beta = 0.5;
    rs[0].m_beta = 1.0;
    rs[0].t_beta = 1.1;
    rs[0].tbar_beta = 0.9;
    rs[0].lemma34_lhs = 1.0;
    rs[0].lemma34_rhs = 2.0;
    rs[0].h1_bound_slack = 0.5;
    rs[0].i0_projected = 2.0;
    const ConvergenceReport rep = convergence_report(rs, 1.5);
    int insufficient = 0;
    for (const auto& c : rep.checks)
        if (!c.applicable) ++insufficient;
    CHECK(insufficient == 4);  // the four trend checks
    const std::string text = convergence_report_text(rep);
    CHECK(text.find("insufficient data") != std::string::npos);
    CHECK_THROWS_AS(convergence_report({}, 1.0), std::invalid_argument);
}

TEST_CASE("convergence_report flags broken trends") {
    std::vector<SweepRecord> rs(2);
    for (auto& r : rs) {
        r.t_beta = 1.1;
        r.tbar_beta = 0.9;
        r.lemma34_lhs = 1.0;
        r.lemma34_rhs = 2.0;
        r.h1_bound_slack = 0.5;
        r.i0_projected = 2.0;
        r.m_beta = 1.0;
        r.h1_dist = 1.0;
    }
    rs[0].beta = 1.0;
    rs[1].beta = 0.5;
    rs[1].h1_dist = 2.0;  // not decreasing
    const ConvergenceReport rep = convergence_report(rs, 1.5);
    bool found = false;
    for (const auto& c : rep.checks)
        if (c.name == "h1_dist decreasing") {
            found = true;
            CHECK_FALSE(c.pass);
        }
    CHECK(found);
    CHECK_FALSE(rep.all_pass);
}
