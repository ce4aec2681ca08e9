#pragma once

// Independent oracle for disk ground states: solves v'' + v'/r + |v|^{p-1}v = 0,
// v'(0) = 0, v(R) = 0 by bisection on v(0) with a fixed-step RK4 integrator.
// Kept free of the grid/minimization code so it can cross-check it.

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "kirchlab/errors.hpp"

namespace kirchlab {

struct ShootingResult {
    std::vector<double> r;  // radial nodes, 0..R
    std::vector<double> v;  // profile
    double v0 = 0;          // shooting amplitude v(0)
    double boundary_value = 0;
    double grad_norm = 0;   // ||v'||_{L2(2 pi r dr)}
    double S_omega = 0;
    double S = 0;
    int bisections = 0;
};

namespace detail {

inline double odd_pow(double v, double p) {
    return v >= 0 ? std::pow(v, p) : -std::pow(-v, p);
}

struct RadialShot {
    std::vector<double> v, s;  // v and v' at the step nodes
    bool crossed = false;      // hit v = 0 strictly inside (0, R)
};

// RK4 on (v, s): v' = s, s' = -|v|^{p-1}v - s/r  (limit -v^p/2 at r = 0).
inline RadialShot integrate_radial(double c, double p, double radius, int steps) {
    const double h = radius / steps;
    auto fs = [p](double r, double v, double s) {
        const double f = detail::odd_pow(v, p);
        if (r <= 0.0) return -0.5 * f;
        return -f - s / r;
    };
    RadialShot shot;
    shot.v.resize(std::size_t(steps) + 1);
    shot.s.resize(std::size_t(steps) + 1);
    double v = c, s = 0.0;
    shot.v[0] = v;
    shot.s[0] = s;
    for (int k = 0; k < steps; ++k) {
        const double r = k * h;
        const double k1v = s, k1s = fs(r, v, s);
        const double k2v = s + 0.5 * h * k1s, k2s = fs(r + 0.5 * h, v + 0.5 * h * k1v, s + 0.5 * h * k1s);
        const double k3v = s + 0.5 * h * k2s, k3s = fs(r + 0.5 * h, v + 0.5 * h * k2v, s + 0.5 * h * k2s);
        const double k4v = s + h * k3s, k4s = fs(r + h, v + h * k3v, s + h * k3s);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        s += h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
        shot.v[std::size_t(k) + 1] = v;
        shot.s[std::size_t(k) + 1] = s;
        if (!shot.crossed && v <= 0.0 && k + 1 < steps) shot.crossed = true;
    }
    if (shot.v.back() < 0.0) shot.crossed = true;
    return shot;
}

inline double simpson(const std::vector<double>& f, double h) {
    const std::size_t n = f.size() - 1;  // n even by construction
    double s = f[0] + f[n];
    for (std::size_t k = 1; k < n; ++k) s += f[k] * (k % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

} // namespace detail

/// Bisection on the shooting amplitude. A shot that crosses zero before the
/// rim was too high (for p > 1; too low for p < 1), a shot that stays
/// positive was on the other side; the bracket is built from those two
/// behaviors and halved until |v(R)| <= tol * v(0).
inline ShootingResult shooting_oracle(double p, double radius, double tol = 1e-12,
                                      int steps = 8192) {
    if (p <= 0 || p == 1.0) throw ConfigError("shooting_oracle: need p > 0, p != 1");
    if (radius <= 0) throw ConfigError("shooting_oracle: radius must be > 0");
    if (tol <= 0) throw ConfigError("shooting_oracle: tol must be > 0");
    if (steps % 2) ++steps;

    // Crossing radius shrinks with amplitude for p > 1 and grows for p < 1,
    // so the crossing side sits above the staying side for p > 1 and below
    // it for p < 1. The bisection below only needs one amplitude of each kind.
    const double toward_cross = p > 1.0 ? 4.0 : 0.25;
    double c_stay = 0, c_cross = 0;
    detail::RadialShot best;
    {
        double c = 1.0;
        auto shot = detail::integrate_radial(c, p, radius, steps);
        int tries = 0;
        if (shot.crossed) {
            c_cross = c;
            do {
                c /= toward_cross;
                if (++tries > 600) throw BracketError("shooting_oracle: no staying-side bracket");
                shot = detail::integrate_radial(c, p, radius, steps);
            } while (shot.crossed);
            c_stay = c;
        } else {
            c_stay = c;
            best = shot;
            do {
                c *= toward_cross;
                if (++tries > 600) throw BracketError("shooting_oracle: no crossing-side bracket");
                shot = detail::integrate_radial(c, p, radius, steps);
            } while (!shot.crossed);
            c_cross = c;
        }
        if (best.v.empty()) best = detail::integrate_radial(c_stay, p, radius, steps);
    }

    ShootingResult out;
    for (int it = 0; it < 200; ++it) {
        const double c = std::sqrt(c_stay) * std::sqrt(c_cross);
        auto shot = detail::integrate_radial(c, p, radius, steps);
        if (shot.crossed) {
            c_cross = c;
        } else {
            c_stay = c;
            best = std::move(shot);
        }
        out.bisections = it + 1;
        if (std::abs(best.v.back()) <= tol * c_stay &&
            std::abs(c_cross - c_stay) <= 1e-15 * c_stay)
            break;
    }
    const double c_best = c_stay;
    if (std::abs(best.v.back()) > tol * c_best)
        throw ConvergenceError("shooting_oracle: boundary value above tolerance",
                               std::abs(best.v.back()) / c_best);

    const double h = radius / steps;
    out.v0 = c_best;
    out.boundary_value = best.v.back();
    out.r.resize(best.v.size());
    for (std::size_t k = 0; k < out.r.size(); ++k) out.r[k] = double(k) * h;
    out.v = best.v;

    std::vector<double> grad_integrand(best.v.size()), mass_integrand(best.v.size());
    for (std::size_t k = 0; k < best.v.size(); ++k) {
        const double r = out.r[k];
        grad_integrand[k] = best.s[k] * best.s[k] * 2.0 * std::numbers::pi * r;
        mass_integrand[k] =
            std::pow(std::abs(best.v[k]), p + 1.0) * 2.0 * std::numbers::pi * r;
    }
    const double grad2 = detail::simpson(grad_integrand, h);
    const double mass = detail::simpson(mass_integrand, h);
    out.grad_norm = std::sqrt(grad2);
    out.S_omega = grad2 / std::pow(mass, 2.0 / (p + 1.0));
    out.S = std::pow(out.grad_norm, p - 1.0);
    return out;
}

} // namespace kirchlab
