#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "kirchlab/kirchhoff.hpp"
#include "kirchlab/shooting.hpp"

using namespace kirchlab;

namespace {

double sup_diff(const Field& a, const Field& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

} // namespace

TEST_CASE("perturbation hypothesis validation names the violated condition") {
    auto bad_h2 = PerturbationSpec::superlinear(1.0, 3.0);
    auto v = bad_h2.violations(2.0);  // q = 3 >= p = 2
    REQUIRE(!v.empty());
    CHECK(v.front().find("(H2)") != std::string::npos);
    CHECK_THROWS_AS(bad_h2.validate(2.0), ConfigError);

    auto bad_h1 = PerturbationSpec::sublinear(1.0, 0.3, 0.8);
    auto v1 = bad_h1.violations(0.5);  // q = 0.3 < p = 0.5
    REQUIRE(!v1.empty());
    CHECK(v1.front().find("(H1)") != std::string::npos);

    auto wrong_regime = PerturbationSpec::sublinear(1.0, 0.7, 0.8);
    CHECK(!wrong_regime.violations(2.0).empty());

    auto neg = PerturbationSpec::superlinear(-1.0, 2.0);
    bool named_A = false;
    for (auto& s : neg.violations(5.0)) named_A = named_A || s.find("(A)") != std::string::npos;
    CHECK(named_A);

    CHECK(PerturbationSpec::none().violations(2.0).empty());
    CHECK(PerturbationSpec::sublinear(1.0, 0.7, 0.8).violations(0.5).empty());
    CHECK(PerturbationSpec::superlinear(0.5, 2.0).violations(5.0).empty());
}

TEST_CASE("spectral condition lambda < a lambda1 is enforced") {
    const Grid g = build_domain(DomainSpec::rectangle(1.0, 1.0, 32));
    KirchhoffParams prm{1.0, 1.0, 1.0, 5.0};
    const double lambda1 = smallest_eigenvalue(g, 1e-9).lambda1;
    CHECK_NOTHROW(validate_spectral(g, prm, PerturbationSpec::superlinear(0.5 * lambda1, 2.0)));
    CHECK_THROWS_WITH(
        validate_spectral(g, prm, PerturbationSpec::superlinear(1.5 * lambda1, 2.0)),
        Catch::Matchers::ContainsSubstring("lambda < a*lambda1"));
}

TEST_CASE("reconstruction satisfies beta = ||grad u||^2 and the residual bound") {
    const Grid g = build_domain(DomainSpec::disk(1.0, 256));
    const double p = 3.0;
    auto ray = minimize_rayleigh(g, p, 1e-10);
    const GroundState gs = normalize_to_solution(g, ray.w, ray.S_omega, p);

    // resonant fixture scaled to the computed S: aS = 1, bS = 1/2 -> root y = 2
    KirchhoffParams prm{1.0 / gs.S, 0.5 / gs.S, 1.0, 3.0};
    auto rep = find_roots(prm, gs.S, 1e-12);
    REQUIRE(rep.roots.size() == 1);
    CHECK(double(rep.roots[0]) == Catch::Approx(2.0).epsilon(1e-10));

    SolutionRecord rec = reconstruct(g, gs, double(rep.roots[0]), prm, 0);
    CHECK(std::abs(rec.grad_sq - 2.0) <= 1e-6 * 2.0);
    CHECK(rec.residual_rel <= 1e-8);
    for (double v : rec.u) CHECK(v > 0.0);

    // round trip v = eta u recovers the ground state
    Field back = recover_ground_state(g, rec);
    CHECK(sup_diff(back, gs.v) <= 1e-6 * sup_norm(gs.v));
}

TEST_CASE("b = 0 reconstruction solves the semilinear limit problem") {
    const Grid g = build_domain(DomainSpec::disk(1.0, 128));
    const double p = 5.0;
    auto ray = minimize_rayleigh(g, p, 1e-10);
    const GroundState gs = normalize_to_solution(g, ray.w, ray.S_omega, p);
    KirchhoffParams prm{2.0, 0.0, 1.0, p};
    auto rep = find_roots(prm, gs.S, default_root_tol(prm, gs.S));
    REQUIRE(rep.roots.size() == 1);
    SolutionRecord rec = reconstruct(g, gs, double(rep.roots[0]), prm, 0);
    CHECK(rec.residual_rel <= 1e-8);  // -a lap u = u^p via A(u) = a + 0
}

TEST_CASE("kirchhoff residual flags the trivial field") {
    const Grid g = build_domain(DomainSpec::rectangle(1.0, 1.0, 32));
    Field zero(g.interior_count(), 0.0);
    KirchhoffParams prm{1.0, 1.0, 1.0, 2.0};
    CHECK(std::isinf(kirchhoff_residual(g, zero, prm, PerturbationSpec::none(), 1.0)));
    CHECK_THROWS_AS(kirchhoff_residual(g, zero, prm, PerturbationSpec::none(), 2.0),
                    ConfigError);
}

TEST_CASE("homotopy at t = 0 is exactly Kirchhoff-free") {
    const Grid g = build_domain(DomainSpec::rectangle(1.0, 1.0, 32));
    const GroundState gs = solve_sublinear(g, 0.5, 1e-9);
    HomotopyOptions opts;
    opts.max_iter = 300;
    KirchhoffParams p1{1.5, 1.0, 1.0, 0.5};
    KirchhoffParams p2{1.5, 17.0, 2.5, 0.5};
    auto r1 = homotopy_step(g, p1, PerturbationSpec::none(), 0.0, gs.v, opts);
    auto r2 = homotopy_step(g, p2, PerturbationSpec::none(), 0.0, gs.v, opts);
    REQUIRE(r1.status == SolveStatus::Converged);
    for (std::size_t i = 0; i < r1.u.size(); ++i) CHECK(r1.u[i] == r2.u[i]);  // bitwise
}

TEST_CASE("sublinear homotopy converges from different positive starts") {
    const Grid g = build_domain(DomainSpec::rectangle(1.0, 1.0, 32));
    KirchhoffParams prm{1.0, 1.0, 1.0, 0.5};
    const GroundState gs = solve_sublinear(g, 0.5, 1e-10);
    HomotopyOptions opts;
    opts.tol = 1e-12;

    Field init1 = gs.v;
    Field init2(g.interior_count(), 0.5);
    auto r1 = homotopy_step(g, prm, PerturbationSpec::none(), 1.0, init1, opts);
    auto r2 = homotopy_step(g, prm, PerturbationSpec::none(), 1.0, init2, opts);
    REQUIRE(r1.status == SolveStatus::Converged);
    REQUIRE(r2.status == SolveStatus::Converged);
    CHECK(sup_diff(r1.u, r2.u) <= 1e-8 * r1.sup_norm);
    CHECK(r1.residual_rel <= 1e-10);
}

TEST_CASE("homotopy runs on the radial grid as well") {
    const Grid g = build_domain(DomainSpec::disk(1.0, 128));
    KirchhoffParams prm{1.0, 2.0, 1.0, 0.5};
    const GroundState gs = solve_sublinear(g, 0.5, 1e-10);
    HomotopyOptions opts;
    opts.tol = 1e-12;
    auto rec = homotopy_step(g, prm, PerturbationSpec::none(), 1.0, gs.v, opts);
    REQUIRE(rec.status == SolveStatus::Converged);
    CHECK(rec.residual_rel <= 1e-10);

    auto rep = find_roots(prm, gs.S);
    SolutionRecord want = reconstruct(g, gs, double(rep.roots[0]), prm, 0);
    CHECK(sup_diff(rec.u, want.u) <= 1e-7 * want.sup_norm);
}

TEST_CASE("superlinear reconstruction is a fixed point of the homotopy map") {
    const Grid g = build_domain(DomainSpec::rectangle(1.0, 1.0, 32));
    const double p = 5.0;
    auto ray = minimize_rayleigh(g, p, 1e-10);
    const GroundState gs = normalize_to_solution(g, ray.w, ray.S_omega, p);
    KirchhoffParams prm{1.0, 1.0, 1.0, p};
    auto rep = find_roots(prm, gs.S, default_root_tol(prm, gs.S));
    REQUIRE(rep.roots.size() == 1);
    SolutionRecord seed = reconstruct(g, gs, double(rep.roots[0]), prm, 0);

    HomotopyOptions opts;
    opts.tol = 1e-12;
    auto rec = homotopy_step(g, prm, PerturbationSpec::none(), 1.0, seed.u, opts);
    REQUIRE(rec.status == SolveStatus::Converged);
    CHECK(sup_diff(rec.u, seed.u) <= 1e-7 * seed.sup_norm);
    CHECK(rec.residual_rel <= 1e-10);

    // at t = 0 the fixed point is the semilinear scaling a^{1/(p-1)} v
    Field semi = gs.v;
    for (auto& x : semi) x *= std::pow(prm.a, 1.0 / (p - 1.0));
    auto rec0 = homotopy_step(g, prm, PerturbationSpec::none(), 0.0, semi, opts);
    REQUIRE(rec0.status == SolveStatus::Converged);
    CHECK(sup_diff(rec0.u, semi) <= 1e-7 * sup_norm(semi));
}

TEST_CASE("above the threshold the iteration collapses or fails, never converges") {
    const Grid g = build_domain(DomainSpec::rectangle(1.0, 1.0, 32));
    auto ray = minimize_rayleigh(g, 2.0, 1e-10);
    const GroundState gs = normalize_to_solution(g, ray.w, ray.S_omega, 2.0);
    const double threshold = 0.25 / (gs.S * gs.S);
    KirchhoffParams prm{2.0 * std::sqrt(threshold), 2.0 * std::sqrt(threshold), 1.0, 2.0};
    CHECK(find_roots(prm, gs.S).roots.empty());

    HomotopyOptions opts;
    opts.max_iter = 800;
    Field small = gs.v;
    for (auto& x : small) x *= 1e-3;
    auto collapsed = homotopy_step(g, prm, PerturbationSpec::none(), 1.0, small, opts);
    CHECK(collapsed.status == SolveStatus::Collapsed);

    Field mid = gs.v;
    const double y0 = std::pow(1.0 / (2.0 * prm.b * gs.S), 2.0);
    for (auto& x : mid) x *= (prm.a + prm.b * y0);
    auto wander = homotopy_step(g, prm, PerturbationSpec::none(), 1.0, mid, opts);
    CHECK(wander.status != SolveStatus::Converged);
}

TEST_CASE("continuation with perturbation off matches the direct reconstruction") {
    const Grid g = build_domain(DomainSpec::rectangle(1.0, 1.0, 32));
    KirchhoffParams prm{1.0, 1.0, 1.0, 0.5};
    const GroundState gs = solve_sublinear(g, 0.5, 1e-10);
    HomotopyOptions opts;
    opts.tol = 1e-12;
    auto res = continuation(g, prm, PerturbationSpec::none(), default_schedule(), gs.v, opts);
    REQUIRE(res.completed);
    for (std::size_t i = 1; i < res.path.size(); ++i)
        CHECK(res.path[i].provenance.t > res.path[i - 1].provenance.t);

    auto rep = find_roots(prm, gs.S);
    SolutionRecord rec = reconstruct(g, gs, double(rep.roots[0]), prm, 0);
    CHECK(sup_diff(res.path.back().u, rec.u) <= 1e-6 * rec.sup_norm);

    CHECK_THROWS_AS(continuation(g, prm, PerturbationSpec::none(), {0.0, 0.5, 1.0}, gs.v, opts),
                    ConfigError);  // steps > 0.1
}

TEST_CASE("bound sweep: guaranteed regime windows and intermediate-regime growth") {
    const Grid g = build_domain(DomainSpec::rectangle(1.0, 1.0, 32));
    {
        KirchhoffParams prm{1.0, 1.0, 1.0, 0.5};
        const GroundState gs = solve_sublinear(g, 0.5, 1e-10);
        SweepSpec sweep;
        sweep.variable = "t";
        sweep.values = {0.0, 0.5, 1.0};
        auto rep = bound_sweep(g, gs, prm, PerturbationSpec::sublinear(1.0, 0.7, 0.8), sweep);
        CHECK(rep.all_converged);
        CHECK(rep.sup_min > 0.0);
        CHECK(rep.cells.size() == 3);
    }
    {
        auto ray = minimize_rayleigh(g, 2.0, 1e-10);
        const GroundState gs = normalize_to_solution(g, ray.w, ray.S_omega, 2.0);
        KirchhoffParams prm{0.125 * 0.25 / (gs.S * gs.S), 1.0, 1.0, 2.0};
        SweepSpec sweep;
        sweep.variable = "b";
        sweep.values = {1.0, 0.25, 0.0625};
        CHECK_THROWS_AS(bound_sweep(g, gs, prm, PerturbationSpec::none(), sweep), ConfigError);

        sweep.t_fixed = 1.0;  // upper branch at fixed t grows as b decreases
        auto rep = bound_sweep(g, gs, prm, PerturbationSpec::none(), sweep);
        REQUIRE(rep.all_converged);
        REQUIRE(rep.cells.size() == 3);
        CHECK(rep.cells[0].record.sup_norm < rep.cells[1].record.sup_norm);
        CHECK(rep.cells[1].record.sup_norm < rep.cells[2].record.sup_norm);

        sweep.branch = "lower";  // branch-targeted init lands on the lower root
        auto low = bound_sweep(g, gs, prm, PerturbationSpec::none(), sweep);
        REQUIRE(low.all_converged);
        auto roots = find_roots(prm, gs.S);
        REQUIRE(roots.roots.size() == 2);
        CHECK(low.cells[0].record.grad_sq ==
              Catch::Approx(double(roots.roots[0])).epsilon(1e-6));

        sweep.variable = "p";
        CHECK_THROWS_AS(bound_sweep(g, gs, prm, PerturbationSpec::none(), sweep), ConfigError);
    }
}

TEST_CASE("continuation completes across random admissible parameters") {
    const Grid g = build_domain(DomainSpec::rectangle(1.0, 1.0, 32));
    std::mt19937_64 rng(0xf00d);
    auto uni = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    HomotopyOptions opts;
    opts.tol = 1e-11;

    for (int k = 0; k < 3; ++k) {  // sublinear regime with (H1) perturbations
        KirchhoffParams prm{std::exp(uni(-1, 1)), std::exp(uni(-1, 1)), uni(0.3, 2.0),
                            uni(0.15, 0.85)};
        const double q = prm.p + (1.0 - prm.p) * uni(0.2, 0.6);
        const double q1 = q + (1.0 - q) * uni(0.1, 0.5);
        auto pert = PerturbationSpec::sublinear(uni(0.0, 2.0), q, q1);
        const GroundState gs = solve_sublinear(g, prm.p, 1e-10);
        Field init = gs.v;
        const double scale = std::pow(prm.a, 1.0 / (prm.p - 1.0));
        for (auto& x : init) x *= scale;
        auto res = continuation(g, prm, pert, default_schedule(), init, opts);
        REQUIRE(res.completed);
        CHECK(res.path.back().residual_rel <= 1e-8);
    }

    const double lambda1 = smallest_eigenvalue(g, 1e-10).lambda1;
    for (int k = 0; k < 3; ++k) {  // superlinear regime with (H2) perturbations
        const double alpha = uni(0.3, 1.2);
        const double p = std::min(2.0 * alpha + 1.0 + uni(0.5, 3.0), 8.0);
        KirchhoffParams prm{std::exp(uni(-1, 1)), std::exp(uni(-1, 1)), alpha, p};
        auto pert = PerturbationSpec::superlinear(uni(0.1, 0.8) * prm.a * lambda1,
                                                  uni(1.2, 0.5 * (1.0 + p)));
        validate_spectral(g, prm, pert);
        auto ray = minimize_rayleigh(g, p, 1e-10);
        const GroundState gs = normalize_to_solution(g, ray.w, ray.S_omega, p);
        Field init = gs.v;
        const double scale = std::pow(prm.a, 1.0 / (p - 1.0));
        for (auto& x : init) x *= scale;
        auto res = continuation(g, prm, pert, default_schedule(), init, opts);
        REQUIRE(res.completed);
        CHECK(res.path.back().residual_rel <= 1e-8);
    }
}

TEST_CASE("blow-up probe: lower branch settles, upper branch escapes") {
    const Grid g = build_domain(DomainSpec::disk(1.0, 128));
    auto ray = minimize_rayleigh(g, 2.0, 1e-10);
    const GroundState gs = normalize_to_solution(g, ray.w, ray.S_omega, 2.0);
    KirchhoffParams prm{0.125 / (gs.S * gs.S), 1.0, 1.0, 2.0};
    std::vector<double> bs;
    for (int k = 0; k <= 8; ++k) bs.push_back(std::pow(2.0, -k));
    auto tab = blowup_probe(g, gs, prm, bs);
    CHECK(tab.lower_err_monotone);
    CHECK(tab.upper_sup_increasing);
    CHECK(tab.slope_reference == Catch::Approx(-1.0));
    CHECK(std::abs(tab.upper_loglog_slope - tab.slope_reference) <
          0.1 * std::abs(tab.slope_reference));

    KirchhoffParams sup{1.0, 1.0, 1.0, 5.0};
    CHECK_THROWS_AS(blowup_probe(g, gs, sup, bs), ConfigError);
}
