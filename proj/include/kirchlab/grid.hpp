#pragma once

// Discretization layer: 2-D rectangle (5-point stencil) and disk (radial
// reduction), zero-Dirichlet boundary throughout. Quadrature weights are
// chosen so that the discrete integration-by-parts identity
//     sum_i w_i f_i (-Lap_h f)_i == grad_l2(f)^2
// holds to round-off, which makes every energy identity in the higher
// layers testable exactly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "kirchlab/errors.hpp"

namespace kirchlab {

enum class DomainShape { Rectangle, Disk };

struct DomainSpec {
    DomainShape shape = DomainShape::Rectangle;
    double width = 1.0;   // rectangle
    double height = 1.0;  // rectangle
    double radius = 1.0;  // disk
    int resolution = 64;  // cells per side (rectangle), radial points (disk)

    static DomainSpec rectangle(double w, double h, int res) {
        return DomainSpec{DomainShape::Rectangle, w, h, 1.0, res};
    }
    static DomainSpec disk(double r, int res) {
        return DomainSpec{DomainShape::Disk, 1.0, 1.0, r, res};
    }
};

/// Grid function on interior nodes; boundary values are implicitly zero.
struct Field {
    std::vector<double> values;

    Field() = default;
    explicit Field(std::size_t n, double fill = 0.0) : values(n, fill) {}

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    auto begin() { return values.begin(); }
    auto end() { return values.end(); }
    auto begin() const { return values.begin(); }
    auto end() const { return values.end(); }
};

struct Norms {
    double l2 = 0;
    double lq = 0;
    double sup = 0;
    double grad_l2 = 0;
};

class Grid {
public:
    DomainShape shape;
    // rectangle data
    int nx = 0, ny = 0;        // cells per direction
    double hx = 0, hy = 0;
    double width = 0, height = 0;
    // disk data (radial nodes r_i = i*dr, i = 0..m-1; boundary at r_m = R)
    int m = 0;
    double dr = 0, radius = 0;

    std::size_t interior_count() const {
        return shape == DomainShape::Rectangle
                   ? std::size_t(nx - 1) * std::size_t(ny - 1)
                   : std::size_t(m);
    }

    // quadrature weight of interior node i
    double weight(std::size_t i) const {
        if (shape == DomainShape::Rectangle) return hx * hy;
        if (i == 0) return std::numbers::pi * dr * dr * 0.25;  // half-cell disk at r=0
        return 2.0 * std::numbers::pi * (double(i) * dr) * dr;
    }

    double node_x(std::size_t i) const { return hx * double(i % std::size_t(nx - 1) + 1); }
    double node_y(std::size_t i) const { return hy * double(i / std::size_t(nx - 1) + 1); }
    double node_r(std::size_t i) const { return dr * double(i); }

    void check(const Field& f, const char* who) const {
        if (f.size() != interior_count())
            throw DimensionError(std::string(who) + ": field size " + std::to_string(f.size()) +
                                 " does not match grid (" + std::to_string(interior_count()) + ")");
    }
};

inline Grid build_domain(const DomainSpec& spec) {
    if (spec.resolution < 16)
        throw ConfigError("resolution must be >= 16, got " + std::to_string(spec.resolution));
    Grid g;
    g.shape = spec.shape;
    if (spec.shape == DomainShape::Rectangle) {
        if (spec.width <= 0 || spec.height <= 0)
            throw ConfigError("rectangle needs width, height > 0");
        g.nx = spec.resolution;
        g.ny = spec.resolution;
        g.width = spec.width;
        g.height = spec.height;
        g.hx = spec.width / g.nx;
        g.hy = spec.height / g.ny;
    } else {
        if (spec.radius <= 0) throw ConfigError("disk needs radius > 0");
        g.m = spec.resolution;
        g.radius = spec.radius;
        g.dr = spec.radius / g.m;
    }
    return g;
}

// ---------------------------------------------------------------------------
// operators

inline void laplacian_into(const Grid& g, const Field& f, Field& out) {
    g.check(f, "laplacian");
    out.values.resize(f.size());
    if (g.shape == DomainShape::Rectangle) {
        const int ni = g.nx - 1, nj = g.ny - 1;
        const double cx = 1.0 / (g.hx * g.hx), cy = 1.0 / (g.hy * g.hy);
        for (int j = 0; j < nj; ++j) {
            const std::size_t row = std::size_t(j) * ni;
            for (int i = 0; i < ni; ++i) {
                const std::size_t k = row + i;
                const double c = f[k];
                const double w = i > 0 ? f[k - 1] : 0.0;
                const double e = i < ni - 1 ? f[k + 1] : 0.0;
                const double s = j > 0 ? f[k - ni] : 0.0;
                const double n = j < nj - 1 ? f[k + ni] : 0.0;
                out[k] = cx * (2.0 * c - w - e) + cy * (2.0 * c - s - n);
            }
        }
    } else {
        // conservative radial form; symmetry closure at r = 0
        const int m = g.m;
        const double inv2 = 1.0 / (g.dr * g.dr);
        out[0] = 4.0 * (f[0] - f[1]) * inv2;
        for (int i = 1; i < m; ++i) {
            const double rp = (i + 0.5), rm = (i - 0.5);
            const double up = i < m - 1 ? f[std::size_t(i) + 1] : 0.0;
            out[std::size_t(i)] =
                (rp * (f[std::size_t(i)] - up) + rm * (f[std::size_t(i)] - f[std::size_t(i) - 1])) *
                inv2 / double(i);
        }
    }
}

/// -Lap_h f with zero-Dirichlet ghosts (radial form uses v'(0)=0 symmetry).
inline Field apply_laplacian(const Grid& g, const Field& f) {
    Field out;
    laplacian_into(g, f, out);
    return out;
}

inline double dot_w(const Grid& g, const Field& a, const Field& b) {
    g.check(a, "dot_w");
    g.check(b, "dot_w");
    double s = 0;
    if (g.shape == DomainShape::Rectangle) {
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s * g.hx * g.hy;
    }
    for (std::size_t i = 0; i < a.size(); ++i) s += g.weight(i) * a[i] * b[i];
    return s;
}

inline double norm_w(const Grid& g, const Field& a) { return std::sqrt(dot_w(g, a, a)); }

inline double sup_norm(const Field& a) {
    double s = 0;
    for (double v : a) s = std::max(s, std::abs(v));
    return s;
}

/// Dirichlet energy sum over stencil edges (boundary edges included with
/// zero boundary value). Exactly equals dot_w(f, -Lap_h f).
inline double grad_sq_total(const Grid& g, const Field& f) {
    g.check(f, "grad_sq_total");
    double s = 0;
    if (g.shape == DomainShape::Rectangle) {
        const int ni = g.nx - 1, nj = g.ny - 1;
        const double cx = g.hy / g.hx, cy = g.hx / g.hy;
        for (int j = 0; j < nj; ++j) {
            const std::size_t row = std::size_t(j) * ni;
            for (int i = 0; i <= ni; ++i) {
                const double a = i > 0 ? f[row + i - 1] : 0.0;
                const double b = i < ni ? f[row + i] : 0.0;
                s += cx * (a - b) * (a - b);
            }
        }
        for (int i = 0; i < ni; ++i) {
            for (int j = 0; j <= nj; ++j) {
                const double a = j > 0 ? f[std::size_t(j - 1) * ni + i] : 0.0;
                const double b = j < nj ? f[std::size_t(j) * ni + i] : 0.0;
                s += cy * (a - b) * (a - b);
            }
        }
        return s;
    }
    for (int i = 0; i < g.m; ++i) {
        const double up = i < g.m - 1 ? f[std::size_t(i) + 1] : 0.0;
        const double d = f[std::size_t(i)] - up;
        s += 2.0 * std::numbers::pi * (i + 0.5) * d * d;
    }
    return s;
}

/// Pointwise |grad u|^2 from centered differences (zero ghosts at the
/// boundary, symmetry ghost at r = 0).
inline Field gradient_sq_field(const Grid& g, const Field& f) {
    g.check(f, "gradient_sq_field");
    Field out(f.size());
    if (g.shape == DomainShape::Rectangle) {
        const int ni = g.nx - 1, nj = g.ny - 1;
        const double ix = 1.0 / (2.0 * g.hx), iy = 1.0 / (2.0 * g.hy);
        for (int j = 0; j < nj; ++j) {
            const std::size_t row = std::size_t(j) * ni;
            for (int i = 0; i < ni; ++i) {
                const std::size_t k = row + i;
                const double w = i > 0 ? f[k - 1] : 0.0;
                const double e = i < ni - 1 ? f[k + 1] : 0.0;
                const double s = j > 0 ? f[k - ni] : 0.0;
                const double n = j < nj - 1 ? f[k + ni] : 0.0;
                const double gx = (e - w) * ix, gy = (n - s) * iy;
                out[k] = gx * gx + gy * gy;
            }
        }
    } else {
        const int m = g.m;
        const double ir = 1.0 / (2.0 * g.dr);
        out[0] = 0.0;  // v'(0) = 0
        for (int i = 1; i < m; ++i) {
            const double up = i < m - 1 ? f[std::size_t(i) + 1] : 0.0;
            const double d = (up - f[std::size_t(i) - 1]) * ir;
            out[std::size_t(i)] = d * d;
        }
    }
    return out;
}

inline Norms norms(const Grid& g, const Field& f, double q) {
    if (q <= 0) throw DomainError("norms: q must be > 0");
    g.check(f, "norms");
    Norms n;
    double l2 = 0, lq = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double w = g.weight(i), a = std::abs(f[i]);
        l2 += w * a * a;
        lq += w * std::pow(a, q);
        n.sup = std::max(n.sup, a);
    }
    n.l2 = std::sqrt(l2);
    n.lq = std::pow(lq, 1.0 / q);
    n.grad_l2 = std::sqrt(grad_sq_total(g, f));
    return n;
}

inline double lp_norm(const Grid& g, const Field& f, double q) {
    double s = 0;
    for (std::size_t i = 0; i < f.size(); ++i) s += g.weight(i) * std::pow(std::abs(f[i]), q);
    return std::pow(s, 1.0 / q);
}

// ---------------------------------------------------------------------------
// conjugate gradients for -Lap_h u = rhs (SPD in the weighted inner product)

inline std::size_t cg_iteration_cap(const Grid& g) {
    return std::size_t(50.0 * std::sqrt(double(g.interior_count()))) + 1000;
}

inline Field solve_poisson(const Grid& g, const Field& rhs, double tol,
                           const Field* warm_start = nullptr) {
    if (tol <= 0) throw ConfigError("solve_poisson: tol must be > 0");
    g.check(rhs, "solve_poisson");
    const std::size_t n = rhs.size();
    const double rhs_norm2 = dot_w(g, rhs, rhs);
    if (rhs_norm2 == 0.0) return Field(n, 0.0);

    Field x = warm_start ? *warm_start : Field(n, 0.0);
    if (warm_start) g.check(*warm_start, "solve_poisson warm start");
    Field ax, r(n), p(n), ap;
    laplacian_into(g, x, ax);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ax[i];
    p = r;
    double rr = dot_w(g, r, r);
    const double target2 = tol * tol * rhs_norm2;
    const std::size_t cap = cg_iteration_cap(g);
    for (std::size_t it = 0; it < cap; ++it) {
        if (rr <= target2) {
            // guard against accumulated drift in the recurrence
            laplacian_into(g, x, ax);
            for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ax[i];
            const double true_rr = dot_w(g, r, r);
            if (true_rr <= target2) return x;
            p = r;  // restart
            rr = true_rr;
        }
        laplacian_into(g, p, ap);
        const double pap = dot_w(g, p, ap);
        const double alpha = rr / pap;
        for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
        for (std::size_t i = 0; i < n; ++i) r[i] -= alpha * ap[i];
        const double rr_new = dot_w(g, r, r);
        const double beta = rr_new / rr;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        rr = rr_new;
    }
    if (rr <= target2) return x;
    throw ConvergenceError("solve_poisson: CG iteration cap exceeded",
                           std::sqrt(rr / rhs_norm2));
}

// ---------------------------------------------------------------------------
// principal Dirichlet eigenvalue by inverse power iteration

struct EigenPair {
    double lambda1 = 0;
    Field phi1;  // positive, sup-normalized to 1
};

inline EigenPair smallest_eigenvalue(const Grid& g, double tol = 1e-10) {
    if (tol <= 0) throw ConfigError("smallest_eigenvalue: tol must be > 0");
    const std::size_t n = g.interior_count();
    Field x(n, 1.0);
    double nrm = norm_w(g, x);
    for (auto& v : x) v /= nrm;
    Field y = x, ay;
    double lambda = 0;
    const double cg_tol = std::min(1e-11, tol * 1e-2);
    for (int it = 0; it < 500; ++it) {
        y = solve_poisson(g, x, cg_tol, &y);
        nrm = norm_w(g, y);
        for (auto& v : y) v /= nrm;
        lambda = grad_sq_total(g, y);  // Rayleigh quotient at ||y||_w = 1
        laplacian_into(g, y, ay);
        double res2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = ay[i] - lambda * y[i];
            res2 += g.weight(i) * d * d;
        }
        if (std::sqrt(res2) <= tol) {
            double mn = y[0];
            for (double v : y) mn = std::min(mn, v);
            if (mn <= 0.0)
                throw InconsistencyError("smallest_eigenvalue: eigenfunction not positive");
            const double s = sup_norm(y);
            for (auto& v : y) v /= s;
            return {lambda, std::move(y)};
        }
        x = y;
    }
    throw ConvergenceError("smallest_eigenvalue: power iteration cap exceeded", lambda);
}

} // namespace kirchlab
