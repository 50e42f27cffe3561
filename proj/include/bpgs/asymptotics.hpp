// The beta-sweep experiment: convergence of m_beta, t_beta, and v_beta
// to the Schroedinger-Poisson limit, with every checkable limit
// inequality evaluated per sweep point.
//
// i0_of_projected is I_0 evaluated at the dilated field t_beta^2
// v_beta(t_beta .), i.e. the energy functional applied to the actual
// projected state; the upper bound of Lemma 3.1 uses the scalar
// fiber_energy route (exact in t).

#pragma once

#include "bpgs/solver.hpp"

#include <functional>

namespace bpgs {

struct SweepRecord {
    double beta = 0.0;
    double m_beta = 0.0;
    double t_beta = 0.0;        // projection of v_beta onto P_0
    double tbar_beta = 0.0;     // projection of v_0 onto P_beta
    double h1_dist = 0.0;       // ||v_beta - v_0||_{H^1}
    double i0_projected = 0.0;  // I_0(t_beta^2 v_beta(t_beta .))
    double lemma34_lhs = 0.0;   // 3 y_beta + e_beta / beta
    double lemma34_rhs = 0.0;   // 20 pi beta^2 ||v_beta||^4_{L^4}
    double h1_bound_slack = 0.0;  // m_beta - (p-3)/(2p-3) ||v_beta||^2_{H^1}
};

inline const char* sweep_csv_header() {
    return "beta,m_beta,t_beta,tbar_beta,h1_dist,i0_projected,"
           "lemma34_lhs,lemma34_rhs,h1_bound_slack";
}

inline std::string sweep_record_csv(const SweepRecord& r) {
    std::string s;
    s += fmt17(r.beta) + "," + fmt17(r.m_beta) + "," + fmt17(r.t_beta) + "," +
         fmt17(r.tbar_beta) + "," + fmt17(r.h1_dist) + "," +
         fmt17(r.i0_projected) + "," + fmt17(r.lemma34_lhs) + "," +
         fmt17(r.lemma34_rhs) + "," + fmt17(r.h1_bound_slack);
    return s;
}

inline std::string sweep_record_json(const SweepRecord& r) {
    std::string s = "{";
    s += "\"beta\": " + fmt17(r.beta);
    s += ", \"m_beta\": " + fmt17(r.m_beta);
    s += ", \"t_beta\": " + fmt17(r.t_beta);
    s += ", \"tbar_beta\": " + fmt17(r.tbar_beta);
    s += ", \"h1_dist\": " + fmt17(r.h1_dist);
    s += ", \"i0_projected\": " + fmt17(r.i0_projected);
    s += ", \"lemma34_lhs\": " + fmt17(r.lemma34_lhs);
    s += ", \"lemma34_rhs\": " + fmt17(r.lemma34_rhs);
    s += ", \"h1_bound_slack\": " + fmt17(r.h1_bound_slack);
    s += "}";
    return s;
}

// The projection of v_0 onto P_beta and the resulting upper bound for
// m_beta (the limsup half of the convergence argument).
inline std::pair<double, double> check_limsup_bound(const RadialField& v0,
                                                    double beta, double p) {
    const Params prm{p, beta};
    const double tbar = project_NP(v0, prm).t_star;
    const double ub = fiber_energy(v0, prm, tbar);
    return {tbar, ub};
}

// The vanishing-term bound behind the lemma34 columns:
// lhs = 3 y_beta + e_beta/beta, rhs = 20 pi beta^2 ||v||^4_{L^4}.
inline std::pair<double, double> check_vanishing_term(const RadialField& v,
                                                      double beta) {
    if (!(beta > 0.0))
        throw std::invalid_argument("check_vanishing_term: beta must be positive");
    const FieldForms F = double_forms(v, beta);
    const double lhs = 3.0 * F.y_beta + F.e_beta / beta;
    double l4 = 0.0;
    for (int i = 0; i <= v.grid->N; ++i) {
        const double q = v.v[i] * v.v[i];
        l4 += v.grid->w[i] * q * q;
    }
    const double rhs = 20.0 * pi * beta * beta * l4;
    return {lhs, rhs};
}

struct SweepResult {
    SolveReport reference;       // the beta = 0 solve
    std::vector<SweepRecord> records;
    std::vector<SolveReport> solves;  // one per beta, same order as records
};

struct SweepAborted : NumericalError {
    SweepResult partial;
    SweepAborted(const std::string& what, SweepResult p)
        : NumericalError(what), partial(std::move(p)) {}
};

inline SweepRecord make_sweep_record(const SolveReport& rep, const Params& prm,
                                     const RadialField& v0) {
    SweepRecord rec;
    rec.beta = prm.beta;
    rec.m_beta = rep.m;
    rec.t_beta = t_beta_of(rep.v, prm.p);
    rec.tbar_beta = check_limsup_bound(v0, prm.beta, prm.p).first;
    rec.h1_dist = h1_distance(rep.v, v0);
    rec.i0_projected =
        energy(dilate(rep.v, rec.t_beta), Params{prm.p, 0.0});
    auto [lhs, rhs] = check_vanishing_term(rep.v, prm.beta);
    rec.lemma34_lhs = lhs;
    rec.lemma34_rhs = rhs;
    const FieldForms F = compute_forms(rep.v, prm);
    rec.h1_bound_slack =
        rep.m - (prm.p - 3.0) / (2.0 * prm.p - 3.0) * (F.a + F.b);
    return rec;
}

// Runs the beta = 0 reference solve first, then each beta with
// warm-started continuation.  on_record (optional) fires after every
// completed point so callers can persist partial results; a failed solve
// aborts the sweep with the partial results preserved in the exception.
inline SweepResult run_sweep(
        double p, const std::vector<double>& betas, GridPtr grid,
        const SolveOptions& opts,
        const std::function<void(const SweepRecord&)>& on_record = {},
        bool warm_start = true) {
    if (betas.empty())
        throw std::invalid_argument("run_sweep: empty beta list");
    for (size_t i = 0; i < betas.size(); ++i) {
        if (!(betas[i] > 0.0))
            throw std::invalid_argument("run_sweep: betas must be positive");
        if (i > 0 && !(betas[i] < betas[i - 1]))
            throw std::invalid_argument("run_sweep: betas must be strictly decreasing");
    }
    SweepResult result;
    try {
        result.reference = solve_ground_state(Params{p, 0.0}, grid, opts);
    } catch (const NumericalError& e) {
        throw SweepAborted(std::string("reference solve failed: ") + e.what(),
                           std::move(result));
    }
    std::optional<RadialField> warm;
    if (warm_start) warm = result.reference.v;
    for (double beta : betas) {
        const Params prm{p, beta};
        SolveReport rep;
        try {
            rep = solve_sweep_point(prm, grid, warm, opts);
        } catch (const NumericalError& e) {
            throw SweepAborted("solve at beta = " + fmt17(beta) +
                                   " failed: " + e.what(),
                               std::move(result));
        }
        SweepRecord rec = make_sweep_record(rep, prm, result.reference.v);
        if (warm_start) warm = rep.v; else warm.reset();
        result.records.push_back(rec);
        result.solves.push_back(std::move(rep));
        if (on_record) on_record(rec);
    }
    return result;
}

// One named check with its slack (pass means slack >= 0).
struct TrendCheck {
    std::string name;
    bool pass = false;
    bool applicable = true;  // false marks "insufficient data"
    double slack = 0.0;
};

struct ConvergenceReport {
    std::vector<TrendCheck> checks;
    bool all_pass = true;
};

namespace detail {

inline void push_check(ConvergenceReport& rep, const std::string& name,
                       bool pass, double slack) {
    rep.checks.push_back({name, pass, true, slack});
    if (!pass) rep.all_pass = false;
}

template <class Get>
inline void push_decreasing(ConvergenceReport& rep, const std::string& name,
                            const std::vector<SweepRecord>& rs, Get get) {
    if (rs.size() < 2) {
        rep.checks.push_back({name, false, false, 0.0});
        return;
    }
    double worst = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (size_t i = 1; i < rs.size(); ++i) {
        const double slack = get(rs[i - 1]) - get(rs[i]);
        worst = std::min(worst, slack);
        if (!(slack > 0.0)) ok = false;
    }
    push_check(rep, name, ok, worst);
}

}  // namespace detail

// Trend and inequality summary over a sweep.  m0 is the reference level
// of the beta = 0 solve.
inline ConvergenceReport convergence_report(const std::vector<SweepRecord>& rs,
                                            double m0) {
    ConvergenceReport rep;
    if (rs.empty()) throw std::invalid_argument("convergence_report: no records");
    double w;
    w = std::numeric_limits<double>::infinity();
    for (const auto& r : rs) w = std::min(w, r.t_beta - 1.0);
    detail::push_check(rep, "t_beta > 1", w > 0.0, w);
    w = std::numeric_limits<double>::infinity();
    for (const auto& r : rs)
        w = std::min(w, std::min(r.tbar_beta, 1.0 - r.tbar_beta));
    detail::push_check(rep, "tbar_beta in (0,1)", w > 0.0, w);
    w = std::numeric_limits<double>::infinity();
    for (const auto& r : rs) w = std::min(w, r.lemma34_rhs - r.lemma34_lhs);
    detail::push_check(rep, "lemma 3.4 inequality", w >= 0.0, w);
    w = std::numeric_limits<double>::infinity();
    for (const auto& r : rs) w = std::min(w, r.h1_bound_slack);
    detail::push_check(rep, "h1 energy bound", w >= 0.0, w);
    w = std::numeric_limits<double>::infinity();
    for (const auto& r : rs) w = std::min(w, r.i0_projected - m0);
    detail::push_check(rep, "i0_projected >= m_0", w >= 0.0, w);
    detail::push_decreasing(rep, "|t_beta - 1| decreasing", rs,
                            [](const SweepRecord& r) { return std::abs(r.t_beta - 1.0); });
    detail::push_decreasing(rep, "|tbar_beta - 1| decreasing", rs,
                            [](const SweepRecord& r) { return std::abs(r.tbar_beta - 1.0); });
    detail::push_decreasing(rep, "|m_beta - m_0| decreasing", rs,
                            [m0](const SweepRecord& r) { return std::abs(r.m_beta - m0); });
    detail::push_decreasing(rep, "h1_dist decreasing", rs,
                            [](const SweepRecord& r) { return r.h1_dist; });
    for (const auto& c : rep.checks)
        if (!c.applicable) rep.all_pass = rep.all_pass && true;
    return rep;
}

inline std::string convergence_report_text(const ConvergenceReport& rep) {
    std::string s;
    for (const auto& c : rep.checks) {
        s += c.name + ": ";
        if (!c.applicable)
            s += "insufficient data";
        else
            s += (c.pass ? "pass" : "FAIL") + std::string(" (slack ") +
                 fmt17(c.slack) + ")";
        s += "\n";
    }
    s += rep.all_pass ? "all checks pass\n" : "some checks FAILED\n";
    return s;
}

}  // namespace bpgs
