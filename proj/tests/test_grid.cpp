#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "kirchlab/grid.hpp"

using namespace kirchlab;

namespace {

Field random_field(const Grid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field f(g.interior_count());
    for (auto& v : f) v = dist(rng);
    return f;
}

Field manufactured_sine(const Grid& g) {
    Field f(g.interior_count());
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = std::sin(std::numbers::pi * g.node_x(i)) * std::sin(std::numbers::pi * g.node_y(i));
    return f;
}

} // namespace

TEST_CASE("build_domain validates and sizes grids") {
    const Grid rect = build_domain(DomainSpec::rectangle(1.0, 1.0, 64));
    CHECK(rect.interior_count() == 63u * 63u);
    CHECK(rect.hx == Catch::Approx(1.0 / 64));

    const Grid disk = build_domain(DomainSpec::disk(1.0, 256));
    CHECK(disk.interior_count() == 256u);
    CHECK(disk.dr == Catch::Approx(1.0 / 256));

    CHECK_THROWS_AS(build_domain(DomainSpec::rectangle(1.0, 1.0, 8)), ConfigError);
    CHECK_THROWS_AS(build_domain(DomainSpec::disk(-1.0, 64)), ConfigError);
}

TEST_CASE("laplacian of zero is zero; manufactured solution is second order") {
    const Grid g = build_domain(DomainSpec::rectangle(1.0, 1.0, 64));
    Field zero(g.interior_count(), 0.0);
    for (double v : apply_laplacian(g, zero)) CHECK(v == 0.0);

    const Field f = manufactured_sine(g);
    const Field lap = apply_laplacian(g, f);
    const double k = 2.0 * std::numbers::pi * std::numbers::pi;
    double err = 0;
    for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(lap[i] - k * f[i]));
    CHECK(err < 2e-2);  // O(h^2) * 2 pi^2 at h = 1/64

    Field wrong(10, 0.0);
    CHECK_THROWS_AS(apply_laplacian(g, wrong), DimensionError);
}

TEST_CASE("poisson solve: zero rhs, manufactured solution, eigenpair identity") {
    const Grid g = build_domain(DomainSpec::rectangle(1.0, 1.0, 64));
    Field zero(g.interior_count(), 0.0);
    for (double v : solve_poisson(g, zero, 1e-10)) CHECK(v == 0.0);

    const Field exact = manufactured_sine(g);
    Field rhs(g.interior_count());
    const double k = 2.0 * std::numbers::pi * std::numbers::pi;
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = k * exact[i];
    const Field w = solve_poisson(g, rhs, 1e-12);
    double err = 0;
    for (std::size_t i = 0; i < w.size(); ++i) err = std::max(err, std::abs(w[i] - exact[i]));
    CHECK(err < 1.5e-3);  // discretization error at h = 1/64

    auto [lam, phi] = smallest_eigenvalue(g, 1e-11);
    Field lrhs(g.interior_count());
    for (std::size_t i = 0; i < lrhs.size(); ++i) lrhs[i] = lam * phi[i];
    const Field back = solve_poisson(g, lrhs, 1e-12);
    double derr = 0;
    for (std::size_t i = 0; i < back.size(); ++i) derr = std::max(derr, std::abs(back[i] - phi[i]));
    CHECK(derr < 1e-7);

    // applying the stencil to the computed eigenfunction reproduces lambda1 phi1
    const Field lap_phi = apply_laplacian(g, phi);
    double eerr = 0;
    for (std::size_t i = 0; i < phi.size(); ++i)
        eerr = std::max(eerr, std::abs(lap_phi[i] - lam * phi[i]));
    CHECK(eerr < 1e-8);
}

TEST_CASE("radial poisson solves the quadratic profile exactly") {
    const Grid g = build_domain(DomainSpec::disk(1.0, 128));
    Field rhs(g.interior_count(), 4.0);  // -lap (1 - r^2) = 4 in 2-D
    const Field w = solve_poisson(g, rhs, 1e-13);
    double err = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double r = g.node_r(i);
        err = std::max(err, std::abs(w[i] - (1.0 - r * r)));
    }
    CHECK(err < 1e-9);  // stencil exact on quadratics, CG tolerance only
}

TEST_CASE("poisson convergence failure carries the final residual") {
    const Grid g = build_domain(DomainSpec::rectangle(1.0, 1.0, 32));
    const Field f = random_field(g, 5);
    try {
        solve_poisson(g, f, 1e-30);  // below what CG can reach in finite precision
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.residual > 0.0);
        CHECK(e.residual < 1e-10);
    }
}

TEST_CASE("discrete maximum principle") {
    for (auto spec : {DomainSpec::rectangle(1.0, 1.0, 32), DomainSpec::disk(1.0, 64)}) {
        const Grid g = build_domain(spec);
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> dist(0.0, 1.0);
        Field rhs(g.interior_count());
        for (auto& v : rhs) v = dist(rng);
        const Field w = solve_poisson(g, rhs, 1e-12);
        for (double v : w) CHECK(v >= 0.0);
    }
}

TEST_CASE("operator symmetry and integration-by-parts identity") {
    for (auto spec : {DomainSpec::rectangle(0.8, 1.3, 32), DomainSpec::disk(1.7, 64)}) {
        const Grid g = build_domain(spec);
        const Field f = random_field(g, 11), h = random_field(g, 12);
        const double lhs = dot_w(g, apply_laplacian(g, f), h);
        const double rhs = dot_w(g, f, apply_laplacian(g, h));
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-11));

        const double energy = dot_w(g, apply_laplacian(g, f), f);
        const double edges = grad_sq_total(g, f);
        CHECK(energy == Catch::Approx(edges).epsilon(1e-11));
    }
}

TEST_CASE("norms on simple fields") {
    const Grid g = build_domain(DomainSpec::rectangle(1.0, 1.0, 32));
    Field zero(g.interior_count(), 0.0);
    auto nz = norms(g, zero, 3.0);
    CHECK(nz.l2 == 0.0);
    CHECK(nz.lq == 0.0);
    CHECK(nz.sup == 0.0);
    CHECK(nz.grad_l2 == 0.0);

    Field c(g.interior_count(), -2.5);
    CHECK(norms(g, c, 2.0).sup == 2.5);
    CHECK_THROWS_AS(norms(g, c, 0.0), DomainError);
}

TEST_CASE("manufactured poisson error decays at order two") {
    auto err_at = [](int res) {
        const Grid g = build_domain(DomainSpec::rectangle(1.0, 1.0, res));
        const Field exact = manufactured_sine(g);
        Field rhs(g.interior_count());
        const double k = 2.0 * std::numbers::pi * std::numbers::pi;
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = k * exact[i];
        const Field w = solve_poisson(g, rhs, 1e-12);
        double err = 0;
        for (std::size_t i = 0; i < w.size(); ++i) err = std::max(err, std::abs(w[i] - exact[i]));
        return err;
    };
    const double ratio = err_at(32) / err_at(64);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("principal eigenvalue: square, disk, scaling") {
    const Grid square = build_domain(DomainSpec::rectangle(1.0, 1.0, 64));
    auto [lam_sq, phi_sq] = smallest_eigenvalue(square, 1e-10);
    const double two_pi2 = 2.0 * std::numbers::pi * std::numbers::pi;
    CHECK(std::abs(lam_sq - two_pi2) / two_pi2 < 0.01);
    for (double v : phi_sq) CHECK(v > 0.0);
    CHECK(sup_norm(phi_sq) == Catch::Approx(1.0));

    const Grid disk = build_domain(DomainSpec::disk(1.0, 256));
    const double j01 = 2.404825557695773;
    CHECK(std::abs(smallest_eigenvalue(disk, 1e-10).lambda1 - j01 * j01) / (j01 * j01) < 0.01);

    // same node count on the doubled square: the discrete eigenvalue scales exactly
    const Grid big = build_domain(DomainSpec::rectangle(2.0, 2.0, 64));
    const double lam_big = smallest_eigenvalue(big, 1e-10).lambda1;
    CHECK(lam_big == Catch::Approx(lam_sq / 4.0).epsilon(1e-7));
    CHECK(lam_big < lam_sq);
}
