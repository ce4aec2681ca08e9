#pragma once

// The acceptance suite: nine property/fixture checks, each printing one
// pass/fail line. Shared by the `verify` CLI subcommand and the ctest
// acceptance binary. Random draws use fixed seeds; every tolerance is
// pinned here.

#include <algorithm>
#include <cmath>
#include <future>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kirchlab/branch.hpp"
#include "kirchlab/grid.hpp"
#include "kirchlab/groundstate.hpp"
#include "kirchlab/kirchhoff.hpp"
#include "kirchlab/shooting.hpp"

namespace kirchlab::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    }
    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }
};

// Randomized parameter tuples per regime. a, b are log-uniform on
// [1e-3, 1e3] and S on [1e-2, 1e2]; the exponents are sampled strictly
// inside each case's region, with data-dependent margins that keep the
// branch-equation terms at the roots within ~1e7 * max(aS, 1) so the
// root-residual gate is meaningful in floating point.
struct Tuple {
    KirchhoffParams prm;
    double S;
};

inline Tuple draw_case_i(Rng& rng) {
    Tuple t;
    t.prm.a = rng.log_uniform(1e-3, 1e3);
    t.prm.b = rng.log_uniform(1e-3, 1e3);
    t.S = rng.log_uniform(1e-2, 1e2);
    t.prm.p = rng.uniform(0.1, 0.9);
    t.prm.alpha = rng.uniform(0.25, 3.0);
    return t;
}

inline Tuple draw_case_ii(Rng& rng) {
    Tuple t;
    t.prm.a = rng.log_uniform(1e-3, 1e3);
    t.prm.b = rng.log_uniform(1e-3, 1e3);
    t.S = rng.log_uniform(1e-2, 1e2);
    const double La = std::log10(t.prm.a * t.S);
    const double Lb = std::log10(t.prm.b * t.S);
    const double K = (7.0 + std::max(La, 0.0)) / std::max(std::abs(Lb), 0.5);
    const double glo = std::max(0.4, 0.3 / K);
    const double gamma = rng.uniform(glo, glo + 1.5);
    const double alo = gamma / 2.0 + 0.125;
    const double ahi = std::min({gamma * (K + 1.0) / 2.0, gamma / 2.0 + 2.0, 3.5});
    t.prm.alpha = rng.uniform(alo, std::max(ahi, alo + 1e-6));
    t.prm.p = 2.0 * t.prm.alpha + 1.0 - gamma;
    return t;
}

inline Tuple draw_case_iii(Rng& rng) {
    Tuple t;
    t.prm.a = rng.log_uniform(1e-3, 1e3);
    t.prm.b = rng.log_uniform(1e-3, 1e3);
    t.S = rng.log_uniform(1e-2, 1e2);
    const double La = std::log10(t.prm.a * t.S);
    const double Lb = std::log10(t.prm.b * t.S);
    const double mgamma = rng.uniform(0.5, 2.5);
    double ahi = 3.0;
    if (Lb > 0) {
        const double K3 = (7.0 + std::max(La, 0.0)) / Lb;
        ahi = std::min(ahi, mgamma * (K3 - 1.0) / 2.0);
    }
    t.prm.alpha = rng.uniform(0.1, std::max(ahi, 0.1 + 1e-6));
    t.prm.p = 2.0 * t.prm.alpha + 1.0 + mgamma;
    return t;
}

inline Tuple draw_case_iv(Rng& rng) {
    Tuple t;
    t.prm.a = rng.log_uniform(1e-3, 1e3);
    t.S = rng.log_uniform(1e-2, 1e2);
    do {
        t.prm.b = rng.log_uniform(1e-3, 1e3);
    } while (std::abs(t.prm.b * t.S - 1.0) < 1e-4);  // keep off the bS = 1 knife edge
    t.prm.alpha = rng.uniform(0.25, 3.0);
    t.prm.p = 2.0 * t.prm.alpha + 1.0;
    return t;
}

} // namespace detail

// --------------------------------------------------------------------------
// 1. regime classification exactness over randomized tuples

inline CriterionResult criterion_regime_exactness() {
    CriterionResult cr{1, "regime-classification-exactness", false, ""};
    detail::Rng rng(0x5eed0001);
    const int per_case = 1000;
    int mismatches = 0, bad_roots = 0;
    int ii_two = 0, ii_zero = 0, iv_one = 0, iv_zero = 0;
    double worst_f = 0;

    for (int c = 0; c < 4; ++c) {
        for (int k = 0; k < per_case; ++k) {
            detail::Tuple t;
            switch (c) {
                case 0: t = detail::draw_case_i(rng); break;
                case 1: t = detail::draw_case_ii(rng); break;
                case 2: t = detail::draw_case_iii(rng); break;
                default: t = detail::draw_case_iv(rng); break;
            }
            RegimeReport rep;
            try {
                rep = find_roots(t.prm, t.S, default_root_tol(t.prm, t.S));
            } catch (const std::exception&) {
                ++mismatches;
                continue;
            }
            if (int(rep.roots.size()) != rep.predicted_count) ++mismatches;
            const double gate = 1e-10 * std::max(t.prm.a * t.S, 1.0);
            for (long double y : rep.roots) {
                const double fv = std::abs(double(eval_f(y, t.prm, t.S)));
                worst_f = std::max(worst_f, fv / gate);
                if (fv > gate) ++bad_roots;
            }
            if (c == 1) (rep.predicted_count == 2 ? ii_two : ii_zero) += 1;
            if (c == 3) (rep.predicted_count == 1 ? iv_one : iv_zero) += 1;
        }
    }
    const bool covered = ii_two >= 25 && ii_zero >= 25 && iv_one >= 100 && iv_zero >= 100;
    cr.pass = mismatches == 0 && bad_roots == 0 && covered;
    cr.detail = "0 mismatches required: got " + std::to_string(mismatches) + "; roots over gate: " +
                std::to_string(bad_roots) + "; worst |f|/gate=" + detail::fmt(worst_f) +
                "; coverage ii(2/0)=" + std::to_string(ii_two) + "/" + std::to_string(ii_zero) +
                " iv(1/0)=" + std::to_string(iv_one) + "/" + std::to_string(iv_zero);
    return cr;
}

// --------------------------------------------------------------------------
// 2. closed-form root fixtures

inline CriterionResult criterion_root_fixtures() {
    CriterionResult cr{2, "closed-form-root-fixtures", false, ""};
    double worst = 0;
    auto check = [&](double got, double want) {
        worst = std::max(worst, std::abs(got - want));
        return std::abs(got - want) <= 1e-10;
    };
    bool ok = true;
    {
        KirchhoffParams prm{0.25, 0.25, 1.0, 2.0};
        auto rep = find_roots(prm, 1.0, 1e-12);
        const double s3 = std::sqrt(3.0);
        ok = ok && rep.roots.size() == 2 && check(rep.roots[0], (2.0 - s3) * (2.0 - s3)) &&
             check(rep.roots[1], (2.0 + s3) * (2.0 + s3));
    }
    {
        KirchhoffParams prm{1.0, 1.0, 1.0, 5.0};
        auto rep = find_roots(prm, 1.0, 1e-12);
        ok = ok && rep.roots.size() == 1 &&
             check(rep.roots[0], (1.0 + std::sqrt(5.0)) / 2.0);
    }
    {
        KirchhoffParams prm{1.0, 0.5, 1.0, 3.0};
        auto rep = find_roots(prm, 1.0, 1e-12);
        ok = ok && rep.label == CaseLabel::Resonant && rep.roots.size() == 1 &&
             check(rep.roots[0], 2.0);
    }
    {
        KirchhoffParams prm{0.5, 0.5, 1.0, 2.0};
        auto rep = find_roots(prm, 1.0, 1e-12);
        ok = ok && rep.predicted_count == 1 && rep.roots.size() == 1 &&
             check(rep.roots[0], 1.0) && std::abs(eval_f(1.0, prm, 1.0)) <= 1e-10;
    }
    cr.pass = ok;
    cr.detail = "worst |root - closed form| = " + detail::fmt(worst) + " (gate 1e-10)";
    return cr;
}

// --------------------------------------------------------------------------
// 3. reduction identity over a (a, b, p) fixture grid

inline CriterionResult criterion_reduction_identity() {
    CriterionResult cr{3, "reduction-identity", false, ""};
    const Grid g = build_domain(DomainSpec::disk(1.0, 256));
    const double alpha = 1.25;  // p = 5, 7 sit above 2 alpha + 1 = 3.5; p = 0.5 below 1
    double worst_id = 0, worst_res = 0, worst_rt = 0;
    int records = 0;
    for (double p : {0.5, 5.0, 7.0}) {
        const GroundState gs = compute_ground_state(g, p, 1e-10);
        for (double a : {0.5, 1.0, 2.0}) {
            for (double b : {0.1, 1.0, 10.0}) {
                KirchhoffParams prm{a, b, alpha, p};
                auto rep = find_roots(prm, gs.S);
                for (std::size_t i = 0; i < rep.roots.size(); ++i) {
                    SolutionRecord rec = reconstruct(g, gs, rep.roots[i], prm, int(i));
                    ++records;
                    worst_id = std::max(worst_id,
                                        std::abs(rec.grad_sq - rec.beta) / rec.beta);
                    worst_res = std::max(worst_res, rec.residual_rel);
                    Field back = recover_ground_state(g, rec);
                    double diff = 0;
                    for (std::size_t k = 0; k < back.size(); ++k)
                        diff = std::max(diff, std::abs(back[k] - gs.v[k]));
                    worst_rt = std::max(worst_rt, diff / sup_norm(gs.v));
                }
            }
        }
    }
    cr.pass = records == 27 && worst_id <= 1e-6 && worst_res <= 1e-8 && worst_rt <= 1e-6;
    cr.detail = std::to_string(records) + " records; |grad^2-beta|/beta=" + detail::fmt(worst_id) +
                " (1e-6); residual=" + detail::fmt(worst_res) + " (1e-8); round-trip=" +
                detail::fmt(worst_rt) + " (1e-6)";
    return cr;
}

// --------------------------------------------------------------------------
// 4. ground-state cross-validation on the unit disk at p = 3

inline CriterionResult criterion_groundstate_crossval() {
    CriterionResult cr{4, "ground-state-cross-validation", false, ""};
    const Grid g = build_domain(DomainSpec::disk(1.0, 256));
    auto ray = minimize_rayleigh(g, 3.0, 1e-10);
    auto gs = normalize_to_solution(g, ray.w, ray.S_omega, 3.0);
    auto oracle = shooting_oracle(3.0, 1.0, 1e-12, 8192);

    const double s_err = std::abs(ray.S_omega - oracle.S_omega) / oracle.S_omega;
    const double ident =
        std::abs(gs.S - std::pow(ray.S_omega, 2.0)) / std::pow(ray.S_omega, 2.0);
    const double grad2 = grad_sq_total(g, gs.v);
    const double mass = std::pow(lp_norm(g, gs.v, 4.0), 4.0);
    const double energy = std::abs(grad2 - mass) / grad2;

    cr.pass = s_err <= 0.01 && ident <= 1e-6 && energy <= 1e-8;
    cr.detail = "S(Omega) vs oracle: " + detail::fmt(s_err) + " (1%); ||grad v||^{p-1} vs S^{(p+1)/2}: " +
                detail::fmt(ident) + " (1e-6); energy identity: " + detail::fmt(energy) + " (1e-8)";
    return cr;
}

// --------------------------------------------------------------------------
// 5. b -> 0 asymptotics of roots and reconstructions

inline CriterionResult criterion_asymptotics() {
    CriterionResult cr{5, "b-to-zero-asymptotics", false, ""};
    const Grid g = build_domain(DomainSpec::disk(1.0, 256));
    auto ray = minimize_rayleigh(g, 2.0, 1e-10);
    auto gs = normalize_to_solution(g, ray.w, ray.S_omega, 2.0);
    KirchhoffParams prm{1.0, 1.0, 1.0, 2.0};
    // keep the whole b = 2^{-k} family strictly inside the two-root zone
    prm.a = 0.5 * 0.25 / (gs.S * gs.S);

    std::vector<double> bs;
    for (int k = 0; k <= 12; ++k) bs.push_back(std::pow(2.0, -k));

    auto tab = asymptotic_b_to_zero(prm, gs.S, bs);
    bool all_two = tab.two_root_rows == int(bs.size());
    const double slope_err =
        std::abs(tab.y2_loglog_slope - tab.slope_reference) / std::abs(tab.slope_reference);

    auto blow = blowup_probe(g, gs, prm, bs);
    bool rows_ok = true;
    for (auto& row : blow.rows) rows_ok = rows_ok && !row.flagged;

    cr.pass = all_two && tab.y1_err_monotone && slope_err <= 0.05 && rows_ok &&
              blow.lower_err_monotone && blow.upper_sup_increasing;
    cr.detail = "two-root rows " + std::to_string(tab.two_root_rows) + "/13; y1 err monotone=" +
                std::to_string(tab.y1_err_monotone) + "; y2 slope=" +
                detail::fmt(tab.y2_loglog_slope) + " vs " + detail::fmt(tab.slope_reference) +
                " (5%); lower-branch monotone=" + std::to_string(blow.lower_err_monotone) +
                "; upper sup increasing=" + std::to_string(blow.upper_sup_increasing);
    return cr;
}

// --------------------------------------------------------------------------
// 6. homotopy existence runs

inline CriterionResult criterion_homotopy_existence() {
    CriterionResult cr{6, "homotopy-existence", false, ""};
    const Grid g = build_domain(DomainSpec::rectangle(1.0, 1.0, 64));
    HomotopyOptions opts;
    opts.tol = 1e-11;
    opts.cg_tol = 1e-11;
    std::ostringstream detail_ss;
    bool ok = true;

    {  // sublinear regime with its admissible perturbation
        KirchhoffParams prm{1.0, 1.0, 1.0, 0.5};
        GroundState gs = solve_sublinear(g, 0.5, 1e-10);
        Field init = gs.v;  // a = 1: the t = 0 solution
        auto pert = PerturbationSpec::sublinear(1.0, 0.7, 0.8);
        auto res = continuation(g, prm, pert, default_schedule(), init, opts);
        const double endpoint_res = res.completed ? res.path.back().residual_rel : 1.0;
        ok = ok && res.completed && endpoint_res <= 1e-8;
        detail_ss << "sublinear endpoint residual " << detail::fmt(endpoint_res) << " (1e-8)";

        auto bare = continuation(g, prm, PerturbationSpec::none(), default_schedule(), init, opts);
        auto rep = find_roots(prm, gs.S);
        SolutionRecord rec = reconstruct(g, gs, rep.roots.front(), prm, 0);
        double diff = 0;
        if (bare.completed)
            for (std::size_t i = 0; i < rec.u.size(); ++i)
                diff = std::max(diff, std::abs(bare.path.back().u[i] - rec.u[i]));
        const double rel = diff / rec.sup_norm;
        ok = ok && bare.completed && rel <= 1e-6;
        detail_ss << "; matches reconstruct to " << detail::fmt(rel) << " (1e-6)";
    }
    {  // superlinear regime p > 2 alpha + 1
        KirchhoffParams prm{1.0, 1.0, 1.0, 5.0};
        auto ray = minimize_rayleigh(g, 5.0, 1e-10);
        GroundState gs = normalize_to_solution(g, ray.w, ray.S_omega, 5.0);
        const double lambda1 = smallest_eigenvalue(g, 1e-10).lambda1;
        auto pert = PerturbationSpec::superlinear(0.5 * prm.a * lambda1, 2.0);
        validate_spectral(g, prm, pert);
        Field init = gs.v;  // a = 1
        auto res = continuation(g, prm, pert, default_schedule(), init, opts);
        const double endpoint_res = res.completed ? res.path.back().residual_rel : 1.0;
        ok = ok && res.completed && endpoint_res <= 1e-8;
        detail_ss << "; superlinear endpoint residual " << detail::fmt(endpoint_res) << " (1e-8)";

        auto bare = continuation(g, prm, PerturbationSpec::none(), default_schedule(), init, opts);
        auto rep = find_roots(prm, gs.S);
        SolutionRecord rec = reconstruct(g, gs, rep.roots.front(), prm, 0);
        double diff = 0;
        if (bare.completed)
            for (std::size_t i = 0; i < rec.u.size(); ++i)
                diff = std::max(diff, std::abs(bare.path.back().u[i] - rec.u[i]));
        const double rel = diff / rec.sup_norm;
        ok = ok && bare.completed && rel <= 1e-6;
        detail_ss << "; matches reconstruct to " << detail::fmt(rel) << " (1e-6)";
    }
    cr.pass = ok;
    cr.detail = detail_ss.str();
    return cr;
}

// --------------------------------------------------------------------------
// 7. uniform-bound coherence across sweeps and resolutions

inline CriterionResult criterion_uniform_bounds(int threads) {
    CriterionResult cr{7, "uniform-bound-coherence", false, ""};
    HomotopyOptions opts;
    opts.tol = 1e-10;
    opts.cg_tol = 1e-11;

    struct Window {
        double lo = 0, hi = 0;
        bool ok = false;
    };
    auto sublinear_window = [&](int resolution) -> Window {
        const Grid g = build_domain(DomainSpec::rectangle(1.0, 1.0, resolution));
        KirchhoffParams prm{1.0, 1.0, 1.0, 0.5};
        GroundState gs = solve_sublinear(g, 0.5, 1e-10);
        SweepSpec sweep;
        sweep.variable = "t";
        sweep.values = {0.0, 0.25, 0.5, 0.75, 1.0};
        auto rep = bound_sweep(g, gs, prm, PerturbationSpec::sublinear(1.0, 0.7, 0.8), sweep, opts);
        return {rep.sup_min, rep.sup_max, rep.all_converged && rep.sup_min > 0};
    };
    auto superlinear_window = [&](int resolution) -> Window {
        const Grid g = build_domain(DomainSpec::rectangle(1.0, 1.0, resolution));
        KirchhoffParams prm{1.0, 1.0, 1.0, 5.0};
        auto ray = minimize_rayleigh(g, 5.0, 1e-10);
        GroundState gs = normalize_to_solution(g, ray.w, ray.S_omega, 5.0);
        const double al1 = prm.a * smallest_eigenvalue(g, 1e-10).lambda1;
        SweepSpec sweep;
        sweep.variable = "lambda";
        sweep.values = {0.1 * al1, 0.9 * al1};
        sweep.threads = threads;
        auto rep = bound_sweep(g, gs, prm, PerturbationSpec::superlinear(0.1 * al1, 2.0), sweep, opts);
        return {rep.sup_min, rep.sup_max, rep.all_converged && rep.sup_min > 0};
    };

    auto f64 = std::async(std::launch::async, sublinear_window, 64);
    auto f128 = std::async(std::launch::async, sublinear_window, 128);
    Window sub64 = f64.get(), sub128 = f128.get();
    Window sup64 = superlinear_window(64);
    Window sup128 = superlinear_window(128);

    auto drift = [](const Window& a, const Window& b) {
        return std::max(std::abs(a.lo - b.lo) / a.lo, std::abs(a.hi - b.hi) / a.hi);
    };
    const double sub_drift = drift(sub64, sub128);
    const double sup_drift = drift(sup64, sup128);
    cr.pass = sub64.ok && sub128.ok && sup64.ok && sup128.ok && sub_drift < 0.10 &&
              sup_drift < 0.10;
    cr.detail = "sublinear window [" + detail::fmt(sub128.lo) + ", " + detail::fmt(sub128.hi) +
                "], drift " + detail::fmt(sub_drift) + "; superlinear window [" +
                detail::fmt(sup128.lo) + ", " + detail::fmt(sup128.hi) + "], drift " +
                detail::fmt(sup_drift) + " (both < 0.10)";
    return cr;
}

// --------------------------------------------------------------------------
// 8. nonexistence coherence above the two-branch threshold

inline CriterionResult criterion_nonexistence(int threads) {
    CriterionResult cr{8, "nonexistence-coherence", false, ""};
    const Grid g = build_domain(DomainSpec::rectangle(1.0, 1.0, 64));
    auto ray = minimize_rayleigh(g, 2.0, 1e-10);
    GroundState gs = normalize_to_solution(g, ray.w, ray.S_omega, 2.0);
    const double threshold = 0.25 / (gs.S * gs.S);  // a b = gamma [(p-1)^{p-1}/(2 alpha S)^{2 alpha}]^{1/gamma}

    HomotopyOptions opts;
    opts.tol = 1e-11;
    opts.cg_tol = 1e-10;
    opts.max_iter = 1000;

    std::vector<double> margins = {1.5, 2.0, 4.0, 8.0, 16.0};
    int zero_root_cells = 0;
    std::vector<std::future<SolveStatus>> futs;
    auto run_cell = [&](double margin) {
        KirchhoffParams prm{std::sqrt(margin * threshold), std::sqrt(margin * threshold), 1.0, 2.0};
        const double y0 = std::pow(1.0 / (2.0 * prm.b * gs.S), 2.0);
        Field init = gs.v;
        const double scale = prm.a + prm.b * y0;  // the would-be tangent amplitude
        for (auto& x : init) x *= scale;
        return homotopy_step(g, prm, PerturbationSpec::none(), 1.0, init, opts).status;
    };
    for (double m : margins) {
        KirchhoffParams prm{std::sqrt(m * threshold), std::sqrt(m * threshold), 1.0, 2.0};
        if (find_roots(prm, gs.S).roots.empty()) ++zero_root_cells;
        if (threads > 1)
            futs.push_back(std::async(std::launch::async, run_cell, m));
    }
    int nontrivial = 0;
    for (std::size_t i = 0; i < margins.size(); ++i) {
        const SolveStatus st = threads > 1 ? futs[i].get() : run_cell(margins[i]);
        if (st == SolveStatus::Converged) ++nontrivial;
    }
    cr.pass = zero_root_cells == int(margins.size()) && nontrivial == 0;
    cr.detail = std::to_string(zero_root_cells) + "/5 cells classified rootless; " +
                std::to_string(nontrivial) + " spurious nontrivial fixed points (must be 0)";
    return cr;
}

// --------------------------------------------------------------------------
// 9. numerical infrastructure

inline CriterionResult criterion_infrastructure() {
    CriterionResult cr{9, "numerical-infrastructure", false, ""};
    // manufactured Poisson convergence
    auto manufactured_error = [](int res) {
        const Grid g = build_domain(DomainSpec::rectangle(1.0, 1.0, res));
        Field rhs(g.interior_count()), exact(g.interior_count());
        const double k = 2.0 * std::numbers::pi * std::numbers::pi;
        for (std::size_t i = 0; i < rhs.size(); ++i) {
            const double s = std::sin(std::numbers::pi * g.node_x(i)) *
                             std::sin(std::numbers::pi * g.node_y(i));
            rhs[i] = k * s;
            exact[i] = s;
        }
        Field w = solve_poisson(g, rhs, 1e-12);
        double err = 0;
        for (std::size_t i = 0; i < w.size(); ++i)
            err = std::max(err, std::abs(w[i] - exact[i]));
        return err;
    };
    const double e32 = manufactured_error(32);
    const double e64 = manufactured_error(64);
    const double e128 = manufactured_error(128);
    const double r1 = e32 / e64, r2 = e64 / e128;
    const bool order2 = r1 >= 3.5 && r1 <= 4.5 && r2 >= 3.5 && r2 <= 4.5;

    // principal eigenvalue of the unit square
    const Grid g64 = build_domain(DomainSpec::rectangle(1.0, 1.0, 64));
    const double lam = smallest_eigenvalue(g64, 1e-10).lambda1;
    const double lam_exact = 2.0 * std::numbers::pi * std::numbers::pi;
    const double lam_err = std::abs(lam - lam_exact) / lam_exact;

    // branch derivative vs centered finite differences
    detail::Rng rng(0x5eed0009);
    double worst_fd = 0;
    int tested = 0;
    while (tested < 200) {
        auto t = detail::draw_case_ii(rng);
        const double y = rng.log_uniform(1e-3, 1e3);
        const double h = 1e-6 * y;
        const double an = eval_fprime(y, t.prm, t.S);
        const double scale = std::pow(y, (t.prm.p - 1.0) / 2.0) +
                             t.prm.b * t.S * std::pow(y, t.prm.alpha) + t.prm.a * t.S;
        if (std::abs(an) * y < 1e-3 * scale) continue;  // too close to the critical point
        const double fd = (eval_f(y + h, t.prm, t.S) - eval_f(y - h, t.prm, t.S)) / (2.0 * h);
        worst_fd = std::max(worst_fd, std::abs(fd - an) / std::abs(an));
        ++tested;
    }
    const bool fd_ok = worst_fd <= 1e-6;

    cr.pass = order2 && lam_err <= 0.01 && fd_ok;
    cr.detail = "error ratios " + detail::fmt(r1) + ", " + detail::fmt(r2) +
                " (in [3.5,4.5]); lambda1 err " + detail::fmt(lam_err) + " (1%); f' vs FD " +
                detail::fmt(worst_fd) + " (1e-6)";
    return cr;
}

// --------------------------------------------------------------------------

inline std::vector<CriterionResult> run(const std::vector<int>& ids, int threads,
                                        std::ostream& out) {
    std::vector<CriterionResult> results;
    auto want = [&](int id) {
        return ids.empty() || std::find(ids.begin(), ids.end(), id) != ids.end();
    };
    auto exec = [&](int id, auto&& fn) {
        if (!want(id)) return;
        CriterionResult r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r.id = id;
            r.name = "criterion-" + std::to_string(id);
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        out << (r.pass ? "PASS" : "FAIL") << "  " << r.id << ". " << r.name << " -- " << r.detail
            << "\n";
        out.flush();
        results.push_back(std::move(r));
    };

    exec(1, [] { return criterion_regime_exactness(); });
    exec(2, [] { return criterion_root_fixtures(); });
    exec(3, [] { return criterion_reduction_identity(); });
    exec(4, [] { return criterion_groundstate_crossval(); });
    exec(5, [] { return criterion_asymptotics(); });
    exec(6, [] { return criterion_homotopy_existence(); });
    exec(7, [&] { return criterion_uniform_bounds(threads); });
    exec(8, [&] { return criterion_nonexistence(threads); });
    exec(9, [] { return criterion_infrastructure(); });
    return results;
}

inline int run_and_print(const std::vector<int>& ids, int threads, std::ostream& out) {
    auto results = run(ids, threads, out);
    int failures = 0;
    for (auto& r : results)
        if (!r.pass) ++failures;
    out << (failures == 0 ? "ALL CRITERIA PASSED" : std::to_string(failures) + " CRITERIA FAILED")
        << " (" << results.size() << " run)\n";
    return failures;
}

} // namespace kirchlab::acceptance
