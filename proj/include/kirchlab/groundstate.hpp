#pragma once

// Positive ground states of -Lap v = v^p with zero Dirichlet data, the
// attained quotient constant S_omega = inf ||grad u||_2^2 / ||u||_{p+1}^2,
// and the derived constant S = ||grad v||_2^{p-1} = S_omega^{(p+1)/2} that
// feeds the branch equation.

#include <cmath>
#include <utility>
#include <vector>

#include "kirchlab/grid.hpp"

namespace kirchlab {

inline constexpr double kExponentGap = 0.05;  // |p-1| below this is rejected
inline constexpr double kExponentCap = 9.0;

struct GroundState {
    Field v;
    double p = 0;
    double S_omega = 0;    // attained quotient constant
    double S = 0;          // ||grad v||_2^{p-1}
    double grad_norm = 0;  // ||grad v||_2
    double residual_rel = 0;
    int iterations = 0;
};

inline double pde_residual_rel(const Grid& g, const Field& v, double p) {
    Field av = apply_laplacian(g, v);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double w = g.weight(i);
        const double vp = std::pow(std::max(v[i], 0.0), p);
        const double d = av[i] - vp;
        num += w * d * d;
        den += w * vp * vp;
    }
    return std::sqrt(num / den);
}

/// Unique positive solution of -Lap u = u^p for 0 < p < 1, by monotone
/// iteration u_{k+1} = (-Lap)^{-1}(u_k^p) from the supersolution c*e,
/// -Lap e = 1, c = (sup e)^{p/(1-p)}.
inline GroundState solve_sublinear(const Grid& g, double p, double tol = 1e-9,
                                   double cg_tol = 1e-10, const Field* start = nullptr,
                                   int max_iter = 20000) {
    if (!(p > 0 && p <= 1.0 - kExponentGap))
        throw ConfigError("solve_sublinear: p must lie in (0, " +
                          std::to_string(1.0 - kExponentGap) + "]");
    if (tol <= 0) throw ConfigError("solve_sublinear: tol must be > 0");
    const std::size_t n = g.interior_count();

    Field u;
    if (start) {
        g.check(*start, "solve_sublinear start");
        u = *start;
    } else {
        Field ones(n, 1.0);
        Field e = solve_poisson(g, ones, cg_tol);
        const double c = std::pow(sup_norm(e), p / (1.0 - p));
        u = std::move(e);
        for (auto& x : u) x *= c;
    }

    Field rhs(n), next;
    GroundState gs;
    gs.p = p;
    for (int it = 0; it < max_iter; ++it) {
        for (std::size_t i = 0; i < n; ++i) rhs[i] = std::pow(std::max(u[i], 0.0), p);
        next = solve_poisson(g, rhs, cg_tol, &u);
        u = std::move(next);
        const double res = pde_residual_rel(g, u, p);
        if (res <= tol) {
            double mn = u[0];
            for (double v : u) mn = std::min(mn, v);
            if (mn <= 0.0)
                throw InconsistencyError("solve_sublinear: iterate lost positivity");
            gs.iterations = it + 1;
            gs.residual_rel = res;
            gs.grad_norm = std::sqrt(grad_sq_total(g, u));
            gs.S = std::pow(gs.grad_norm, p - 1.0);
            gs.S_omega = std::pow(gs.S, 2.0 / (p + 1.0));
            gs.v = std::move(u);
            return gs;
        }
    }
    throw ConvergenceError("solve_sublinear: iteration cap exceeded",
                           pde_residual_rel(g, u, p));
}

struct RayleighResult {
    Field w;          // constrained minimizer, ||w||_{p+1} = 1
    double S_omega = 0;
    double residual = 0;  // ||-Lap w - S_omega w^p||_w
    int iterations = 0;
    int polish_iterations = 0;
    std::vector<double> quotient_history;  // accepted descent values, non-increasing
};

/// S_omega = inf ||grad u||^2 on the constraint ||u||_{p+1} = 1.
///
/// Phase 1: projected gradient descent. Steps along -(-Lap u - R u^p),
/// renormalizes, keeps positivity via |.|; trial steps are Barzilai-Borwein,
/// accepted by backtracking halving on the quotient. The quotient is
/// quadratically flat at the minimum, so monotone acceptance bottoms out
/// near stationarity 1e-6; phase 2 (normalized inverse iteration
/// u <- normalize((-Lap)^{-1} u^p)) refines the last digits, driven by the
/// residual instead of quotient comparisons.
inline RayleighResult minimize_rayleigh(const Grid& g, double p, double tol = 1e-10,
                                        double eig_tol = 1e-10, int max_iter = 400000,
                                        const Field* start = nullptr) {
    if (!(p >= 1.0 + kExponentGap && p <= kExponentCap))
        throw ConfigError("minimize_rayleigh: p must lie in [" +
                          std::to_string(1.0 + kExponentGap) + ", " +
                          std::to_string(kExponentCap) + "]");
    if (tol <= 0) throw ConfigError("minimize_rayleigh: tol must be > 0");
    const std::size_t n = g.interior_count();

    Field u = start ? *start : smallest_eigenvalue(g, eig_tol).phi1;
    g.check(u, "minimize_rayleigh start");
    {
        const double s = lp_norm(g, u, p + 1.0);
        for (auto& x : u) x = std::abs(x) / s;
    }

    RayleighResult out;
    Field lap(n), grad(n), trial(n), prev_u, prev_grad;
    const double hmin = g.shape == DomainShape::Rectangle ? std::min(g.hx, g.hy) : g.dr;
    const double step0 = hmin * hmin / 8.0;
    double step = step0;

    laplacian_into(g, u, lap);
    double R = dot_w(g, lap, u);
    out.quotient_history.push_back(R);

    auto stationarity = [&](const Field& f, double quotient, double& scale) {
        Field af = apply_laplacian(g, f);
        double res2 = 0, upn2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double up = std::pow(std::max(f[i], 0.0), p);
            const double d = af[i] - quotient * up;
            res2 += g.weight(i) * d * d;
            upn2 += g.weight(i) * up * up;
        }
        scale = quotient * std::sqrt(upn2);
        return std::sqrt(res2);
    };

    const double descent_exit = std::max(tol, 1e-5);
    bool stalled = false;
    double res = 0, scale = 1;

    for (int it = 0; it < max_iter; ++it) {
        double res2 = 0, upnorm2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double up = std::pow(std::max(u[i], 0.0), p);
            grad[i] = lap[i] - R * up;
            res2 += g.weight(i) * grad[i] * grad[i];
            upnorm2 += g.weight(i) * up * up;
        }
        res = std::sqrt(res2);
        scale = R * std::sqrt(upnorm2);
        out.iterations = it;
        if (res <= descent_exit * scale) break;

        // Barzilai-Borwein trial step from the previous accepted pair
        if (!prev_u.values.empty()) {
            double sy = 0, ss = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double w = g.weight(i);
                const double du = u[i] - prev_u[i];
                const double dg = grad[i] - prev_grad[i];
                ss += w * du * du;
                sy += w * du * dg;
            }
            step = sy > 0 ? ss / sy : step0;
        }
        step = std::clamp(step, step0 * 1e-10, step0 * 1e12);

        prev_u = u;
        prev_grad = grad;

        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] - step * grad[i];
            const double s = lp_norm(g, trial, p + 1.0);
            for (auto& x : trial) x = std::abs(x) / s;
            const double Rt = grad_sq_total(g, trial);
            if (Rt <= R - 1e-4 * step * res2 || Rt < R) {
                u = trial;
                R = Rt;
                out.quotient_history.push_back(R);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            stalled = true;
            break;
        }
        laplacian_into(g, u, lap);
        if (it + 1 == max_iter)
            throw ConvergenceError("minimize_rayleigh: iteration cap exceeded", res / scale);
    }
    if (stalled && res > 1e-3 * scale)
        throw ConvergenceError("minimize_rayleigh: descent stall (step underflow)", res / scale);

    // phase 2: normalized inverse iteration
    const double cg_tol = std::min(1e-12, tol * 1e-2);
    Field rhs(n), best = u;
    double best_res = res;
    int grow_streak = 0;
    for (int it = 0; it < 600; ++it) {
        if (best_res <= tol * scale) break;
        for (std::size_t i = 0; i < n; ++i) rhs[i] = std::pow(std::max(u[i], 0.0), p);
        Field w = solve_poisson(g, rhs, cg_tol, &u);
        const double s = lp_norm(g, w, p + 1.0);
        for (auto& x : w) x = std::abs(x) / s;
        u = std::move(w);
        R = grad_sq_total(g, u);
        res = stationarity(u, R, scale);
        out.polish_iterations = it + 1;
        if (res < best_res) {
            best_res = res;
            best = u;
            grow_streak = 0;
        } else if (++grow_streak >= 8) {
            break;  // saturated at the round-off floor
        }
    }
    double final_scale = 1;
    const double final_res = stationarity(best, grad_sq_total(g, best), final_scale);
    if (final_res > tol * final_scale)
        throw ConvergenceError("minimize_rayleigh: polish could not reach tolerance",
                               final_res / final_scale);
    out.S_omega = grad_sq_total(g, best);
    out.residual = final_res;
    out.w = std::move(best);
    return out;
}

/// Scale the constrained minimizer into a solution of -Lap v = v^p:
/// v = mu^{1/(p-1)} w with the Euler-Lagrange multiplier mu = S_omega.
inline GroundState normalize_to_solution(const Grid& g, const Field& w, double S_omega,
                                         double p, double residual_tol = 1e-8) {
    if (p <= 1.0) throw ConfigError("normalize_to_solution: needs p > 1");
    g.check(w, "normalize_to_solution");
    GroundState gs;
    gs.p = p;
    gs.S_omega = S_omega;
    const double scale = std::pow(S_omega, 1.0 / (p - 1.0));
    gs.v = w;
    for (auto& x : gs.v) x *= scale;
    gs.residual_rel = pde_residual_rel(g, gs.v, p);
    if (gs.residual_rel > residual_tol)
        throw InconsistencyError("normalize_to_solution: minimizer residual " +
                                 std::to_string(gs.residual_rel) + " exceeds tolerance");
    gs.grad_norm = std::sqrt(grad_sq_total(g, gs.v));
    gs.S = std::pow(gs.grad_norm, p - 1.0);
    return gs;
}

/// Convenience: full ground-state pipeline for either exponent regime.
inline GroundState compute_ground_state(const Grid& g, double p, double tol = 1e-9,
                                        double cg_tol = 1e-10) {
    if (p < 1.0) return solve_sublinear(g, p, tol, cg_tol);
    auto r = minimize_rayleigh(g, p, std::min(tol, 1e-9));
    return normalize_to_solution(g, r.w, r.S_omega, p);
}

} // namespace kirchlab
