#pragma once

// Kirchhoff solutions of -(a + b ||grad u||_2^{2 alpha}) Lap u = u^p + h(x,u,grad u):
// reconstruction from (ground state, branch root), the homotopy fixed-point
// solver for the t-family A(t,u) = a + t b ||grad u||^{2 alpha}, parameter
// continuation, bound sweeps, and the b -> 0 blow-up probe.

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kirchlab/branch.hpp"
#include "kirchlab/grid.hpp"
#include "kirchlab/groundstate.hpp"

namespace kirchlab {

// ---------------------------------------------------------------------------
// perturbations (the two admissible families plus none)

struct PerturbationSpec {
    enum class Kind { None, Sublinear, Superlinear };
    Kind kind = Kind::None;
    double mu = 0;      // sublinear strength
    double lambda = 0;  // superlinear linear coefficient
    double q = 0;
    double q1 = 0;      // sublinear second exponent

    static PerturbationSpec none() { return {}; }
    static PerturbationSpec sublinear(double mu, double q, double q1) {
        PerturbationSpec s;
        s.kind = Kind::Sublinear;
        s.mu = mu;
        s.q = q;
        s.q1 = q1;
        return s;
    }
    static PerturbationSpec superlinear(double lambda, double q) {
        PerturbationSpec s;
        s.kind = Kind::Superlinear;
        s.lambda = lambda;
        s.q = q;
        return s;
    }

    std::vector<std::string> violations(double p) const {
        std::vector<std::string> v;
        switch (kind) {
            case Kind::None:
                break;
            case Kind::Sublinear:
                if (!(p > 0 && p < 1)) v.push_back("(H1) applies only to 0<p<1");
                if (!(p < q && q <= q1 && q1 < 1))
                    v.push_back("(H1) requires 0<p<q<=q1<1 (p=" + std::to_string(p) +
                                ", q=" + std::to_string(q) + ", q1=" + std::to_string(q1) + ")");
                if (mu < 0) v.push_back("(A) requires h>=0 for s>0: mu must be >= 0");
                break;
            case Kind::Superlinear:
                if (!(p > 1)) v.push_back("(H2) applies only to 1<p<2*");
                if (!(1 < q && q < p))
                    v.push_back("(H2) requires 1<q<p<2* (q=" + std::to_string(q) +
                                ", p=" + std::to_string(p) + ")");
                if (lambda < 0) v.push_back("(A) requires h>=0 for s>0: lambda must be >= 0");
                break;
        }
        return v;
    }

    void validate(double p) const {
        auto v = violations(p);
        if (v.empty()) return;
        std::string msg = "perturbation hypothesis violated:";
        for (auto& s : v) msg += "\n  " + s;
        throw ConfigError(msg);
    }

    // h(x, s, |grad u|^2); odd in s so overshooting iterates stay smooth
    double operator()(double s, double grad2) const {
        auto opow = [](double x, double e) {
            return x >= 0 ? std::pow(x, e) : -std::pow(-x, e);
        };
        switch (kind) {
            case Kind::None:
                return 0.0;
            case Kind::Sublinear:
                return mu * opow(s, q) + opow(s, q1) * grad2 / (1.0 + grad2);
            case Kind::Superlinear:
                return lambda * s + opow(s, q) * grad2 / (1.0 + grad2);
        }
        return 0.0;
    }
};

/// Compute lambda1(Omega) and enforce the superlinear eigenvalue condition
/// lambda < a lambda1. Returns lambda1 for reporting.
inline double validate_spectral(const Grid& g, const KirchhoffParams& prm,
                                const PerturbationSpec& pert, double eig_tol = 1e-10) {
    const double lambda1 = smallest_eigenvalue(g, eig_tol).lambda1;
    if (pert.kind == PerturbationSpec::Kind::Superlinear &&
        !(pert.lambda < prm.a * lambda1))
        throw ConfigError("eigenvalue condition requires lambda < a*lambda1(Omega): lambda=" +
                          std::to_string(pert.lambda) + ", a*lambda1=" +
                          std::to_string(prm.a * lambda1));
    return lambda1;
}

// ---------------------------------------------------------------------------
// solution records

enum class SolveStatus { Converged, Collapsed, NoConvergence };

struct Provenance {
    enum class Kind { Reconstructed, Homotopy } kind = Kind::Reconstructed;
    int root_index = -1;  // reconstruction: index into the sorted root list
    double t = 1.0;       // homotopy parameter of the record
};

struct SolutionRecord {
    Field u;
    double beta = std::numeric_limits<double>::quiet_NaN();  // reconstruction target
    double grad_sq = 0;
    double sup_norm = 0;
    double residual_rel = 0;
    Provenance provenance;
    KirchhoffParams params;
    PerturbationSpec perturbation;
    SolveStatus status = SolveStatus::Converged;
    int iterations = 0;
};

inline double odd_power(double s, double p) {
    return s >= 0 ? std::pow(s, p) : -std::pow(-s, p);
}

/// ||A(t,u)(-Lap u) - u^p - t h(x,u,grad u)||_2 / ||u^p||_2. Returns +inf for
/// the excluded trivial field.
inline double kirchhoff_residual(const Grid& g, const Field& u, const KirchhoffParams& prm,
                                 const PerturbationSpec& pert, double t) {
    if (!(t >= 0 && t <= 1)) throw ConfigError("kirchhoff_residual: t must lie in [0,1]");
    g.check(u, "kirchhoff_residual");
    if (sup_norm(u) == 0.0) return std::numeric_limits<double>::infinity();
    const double grad2 = grad_sq_total(g, u);
    const double A = prm.a + t * prm.b * std::pow(grad2, prm.alpha);
    Field lap = apply_laplacian(g, u);
    Field g2 = gradient_sq_field(g, u);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double w = g.weight(i);
        const double up = odd_power(u[i], prm.p);
        const double r = A * lap[i] - up - t * pert(u[i], g2[i]);
        num += w * r * r;
        den += w * up * up;
    }
    return std::sqrt(num / den);
}

/// u = (a + b beta^alpha)^{1/(p-1)} v for a branch root beta found with
/// S = gs.S. The measured ||grad u||^2 must reproduce beta; a violation
/// signals an S inconsistent between the modules.
inline SolutionRecord reconstruct(const Grid& g, const GroundState& gs, double beta,
                                  const KirchhoffParams& prm, int root_index = -1,
                                  double identity_tol = 1e-6) {
    prm.validate();
    g.check(gs.v, "reconstruct");
    if (!(beta > 0)) throw DomainError("reconstruct: beta must be > 0");
    SolutionRecord rec;
    rec.params = prm;
    rec.provenance = {Provenance::Kind::Reconstructed, root_index, 1.0};
    rec.beta = beta;
    const double scale = std::pow(prm.a + prm.b * std::pow(beta, prm.alpha), 1.0 / (prm.p - 1.0));
    rec.u = gs.v;
    for (auto& x : rec.u) x *= scale;
    rec.grad_sq = grad_sq_total(g, rec.u);
    rec.sup_norm = sup_norm(rec.u);
    if (std::abs(rec.grad_sq - beta) > identity_tol * beta)
        throw InconsistencyError("reconstruct: ||grad u||^2 = " + std::to_string(rec.grad_sq) +
                                 " disagrees with branch root beta = " + std::to_string(beta));
    rec.residual_rel = kirchhoff_residual(g, rec.u, prm, PerturbationSpec::none(), 1.0);
    rec.status = SolveStatus::Converged;
    return rec;
}

/// Invert the reduction: eta = (a + b ||grad u||^{2 alpha})^{1/(1-p)}, v = eta u.
inline Field recover_ground_state(const Grid& g, const SolutionRecord& rec) {
    const double grad2 = grad_sq_total(g, rec.u);
    const double eta =
        std::pow(rec.params.a + rec.params.b * std::pow(grad2, rec.params.alpha),
                 1.0 / (1.0 - rec.params.p));
    Field v = rec.u;
    for (auto& x : v) x *= eta;
    return v;
}

// ---------------------------------------------------------------------------
// homotopy fixed point

struct HomotopyOptions {
    double tol = 1e-11;          // sup-norm update tolerance, relative
    int max_iter = 2500;
    double cg_tol = 1e-11;
    double collapse_floor = 1e-10;  // vs the initial sup
    double explode_ceiling = 1e12;
    double theta_floor = 1.0 / 64.0;
};

namespace detail {

// Scalar consistency along the scaling ray: find c near 1 with
//   psi(c) = (a + t b c^{2a} gw^a) gw - c^{p-1} m_p - t <h(c w), w>/c = 0.
// Plain Picard is unstable along this ray for p > 1 (derivative p - 2 alpha
// theta_b exceeds 1), so each iterate's amplitude is pinned by this root;
// transverse shape errors contract on their own. At a fixed point c = 1.
inline std::optional<double> amplitude_scale(const Grid& g, const Field& w,
                                             const KirchhoffParams& prm,
                                             const PerturbationSpec& pert, double t) {
    const double gw = grad_sq_total(g, w);
    if (!(gw > 0)) return std::nullopt;
    double mp = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
        mp += g.weight(i) * odd_power(w[i], prm.p) * w[i];
    Field g2;
    const bool with_h = pert.kind != PerturbationSpec::Kind::None && t > 0;
    if (with_h) g2 = gradient_sq_field(g, w);

    auto psi = [&](double c) {
        double v = (prm.a + t * prm.b * std::pow(c, 2.0 * prm.alpha) * std::pow(gw, prm.alpha)) * gw -
                   std::pow(c, prm.p - 1.0) * mp;
        if (with_h) {
            double H = 0;
            const double c2 = c * c;
            for (std::size_t i = 0; i < w.size(); ++i)
                H += g.weight(i) * pert(c * w[i], c2 * g2[i]) * w[i];
            v -= t * H / c;
        }
        return v;
    };

    auto nearest_bracket = [&](double lo_exp, double hi_exp, int steps)
        -> std::optional<std::pair<double, double>> {
        std::optional<std::pair<double, double>> best;
        double best_dist = std::numeric_limits<double>::infinity();
        double prev_c = std::exp2(lo_exp), prev_v = psi(prev_c);
        for (int k = 1; k <= steps; ++k) {
            const double c = std::exp2(lo_exp + (hi_exp - lo_exp) * k / steps);
            const double v = psi(c);
            if ((prev_v <= 0) != (v <= 0)) {
                const double dist = std::abs(std::log(std::sqrt(prev_c * c)));
                if (dist < best_dist) {
                    best_dist = dist;
                    best = {prev_c, c};
                }
            }
            prev_c = c;
            prev_v = v;
        }
        return best;
    };

    auto bracket = nearest_bracket(-0.75, 0.75, 24);
    if (!bracket) bracket = nearest_bracket(-8.0, 8.0, 96);
    if (!bracket) return std::nullopt;

    auto [lo, hi] = *bracket;
    const bool lo_positive = psi(lo) > 0;
    for (int it = 0; it < 80; ++it) {
        const double mid = std::sqrt(lo) * std::sqrt(hi);
        if ((psi(mid) > 0) == lo_positive)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-14 * mid) break;
    }
    return std::sqrt(lo) * std::sqrt(hi);
}

} // namespace detail

/// Damped fixed-point iteration u <- (1-theta) u + theta K_t(u) with
/// K_t(u) = (-Lap)^{-1} [(u^p + t h(x,u,grad u)) / (a + t b ||grad u||^{2 alpha})].
/// For p > 1 each K_t output is amplitude-corrected along the scaling ray
/// (see detail::amplitude_scale). Non-convergence and collapse to zero are
/// reported as statuses, not errors: both are expected outcomes above the
/// two-branch existence threshold.
inline SolutionRecord homotopy_step(const Grid& g, const KirchhoffParams& prm,
                                    const PerturbationSpec& pert, double t, const Field& init,
                                    const HomotopyOptions& opts = {}) {
    prm.validate();
    if (!(t >= 0 && t <= 1)) throw ConfigError("homotopy_step: t must lie in [0,1]");
    g.check(init, "homotopy_step init");
    double mn = init[0];
    for (double v : init) mn = std::min(mn, v);
    if (!(mn > 0)) throw ConfigError("homotopy_step: init must be positive");

    SolutionRecord rec;
    rec.params = prm;
    rec.perturbation = pert;
    rec.provenance = {Provenance::Kind::Homotopy, -1, t};
    rec.status = SolveStatus::NoConvergence;

    const std::size_t n = g.interior_count();
    Field u = init, w(n), rhs(n), g2;
    const double sup0 = sup_norm(init);
    double theta = 1.0;
    double prev_update = std::numeric_limits<double>::infinity();

    for (int it = 0; it < opts.max_iter; ++it) {
        g2 = gradient_sq_field(g, u);
        const double grad2 = grad_sq_total(g, u);
        const double A = prm.a + t * prm.b * std::pow(grad2, prm.alpha);
        for (std::size_t i = 0; i < n; ++i)
            rhs[i] = (odd_power(u[i], prm.p) + t * pert(u[i], g2[i])) / A;
        w = solve_poisson(g, rhs, opts.cg_tol, &w);
        if (prm.p > 1.0) {
            if (auto c = detail::amplitude_scale(g, w, prm, pert, t))
                for (auto& x : w) x *= *c;
        }

        double update = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double nu = (1.0 - theta) * u[i] + theta * w[i];
            update = std::max(update, std::abs(nu - u[i]));
            u[i] = nu;
        }
        if (update > prev_update)
            theta = std::max(theta * 0.5, opts.theta_floor);
        else if (update < 0.5 * prev_update)
            theta = std::min(theta * 1.5, 1.0);
        prev_update = update;

        const double su = sup_norm(u);
        rec.iterations = it + 1;
        if (su < opts.collapse_floor * sup0) {
            rec.status = SolveStatus::Collapsed;
            break;
        }
        if (su > opts.explode_ceiling * sup0 || !std::isfinite(su)) {
            rec.status = SolveStatus::NoConvergence;
            break;
        }
        if (update <= opts.tol * su) {
            rec.status = SolveStatus::Converged;
            break;
        }
    }

    rec.u = std::move(u);
    rec.sup_norm = sup_norm(rec.u);
    rec.grad_sq = grad_sq_total(g, rec.u);
    rec.residual_rel = kirchhoff_residual(g, rec.u, prm, pert, t);
    return rec;
}

// ---------------------------------------------------------------------------
// continuation in t

struct ContinuationResult {
    std::vector<SolutionRecord> path;  // every converged step, ascending t
    bool completed = false;
    std::string message;
};

inline void validate_schedule(const std::vector<double>& ts) {
    if (ts.size() < 2 || std::abs(ts.front()) > 1e-12 || std::abs(ts.back() - 1.0) > 1e-12)
        throw ConfigError("t_schedule must run from 0 to 1");
    for (std::size_t i = 1; i < ts.size(); ++i) {
        if (!(ts[i] > ts[i - 1])) throw ConfigError("t_schedule must be strictly increasing");
        if (ts[i] - ts[i - 1] > 0.1 + 1e-12)
            throw ConfigError("t_schedule steps must be <= 0.1");
    }
}

inline std::vector<double> default_schedule() {
    std::vector<double> ts;
    for (int k = 0; k <= 10; ++k) ts.push_back(k / 10.0);
    return ts;
}

/// Warm-started continuation along the schedule. A failing step is bisected
/// up to 6 times; if the refined step still fails the partial path is
/// returned with completed = false.
inline ContinuationResult continuation(const Grid& g, const KirchhoffParams& prm,
                                       const PerturbationSpec& pert,
                                       const std::vector<double>& t_schedule, const Field& init,
                                       const HomotopyOptions& opts = {}) {
    validate_schedule(t_schedule);
    pert.validate(prm.p);
    ContinuationResult out;
    Field cur = init;

    std::function<bool(double, double, int)> advance = [&](double t_from, double t_to,
                                                           int depth) -> bool {
        SolutionRecord rec = homotopy_step(g, prm, pert, t_to, cur, opts);
        if (rec.status == SolveStatus::Converged) {
            cur = rec.u;
            out.path.push_back(std::move(rec));
            return true;
        }
        if (depth >= 6) {
            out.message = "step to t=" + std::to_string(t_to) + " failed after 6 bisections";
            return false;
        }
        const double mid = 0.5 * (t_from + t_to);
        return advance(t_from, mid, depth + 1) && advance(mid, t_to, depth + 1);
    };

    double t_prev = 0.0;
    for (double t : t_schedule) {
        if (!advance(t_prev, t, t == t_schedule.front() ? 6 : 0)) return out;
        t_prev = t;
    }
    out.completed = true;
    return out;
}

// ---------------------------------------------------------------------------
// bound sweeps

struct SweepSpec {
    std::string variable;        // "t", "a", "b", "alpha", "mu", "lambda", "q", "q1"
    std::vector<double> values;
    std::vector<double> t_schedule = default_schedule();
    std::optional<double> t_fixed;  // required in the intermediate regime
    std::string branch = "upper";   // branch-targeted init for t_fixed runs
    int threads = 1;
};

struct SweepCell {
    double value = 0;
    SolutionRecord record;
    bool converged = false;
};

struct BoundsReport {
    std::string variable;
    std::vector<SweepCell> cells;
    double sup_min = 0, sup_max = 0;
    bool all_converged = true;
    double lambda1 = std::numeric_limits<double>::quiet_NaN();
    double lambda_margin_min = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline bool intermediate_regime(const KirchhoffParams& prm) {
    return prm.p > 1.0 && prm.gamma() > kEqTol * std::max(1.0, 2.0 * prm.alpha + 1.0);
}

inline void apply_sweep_value(KirchhoffParams& prm, PerturbationSpec& pert,
                              const std::string& var, double v) {
    if (var == "a") prm.a = v;
    else if (var == "b") prm.b = v;
    else if (var == "alpha") prm.alpha = v;
    else if (var == "p") prm.p = v;
    else if (var == "mu") pert.mu = v;
    else if (var == "lambda") pert.lambda = v;
    else if (var == "q") pert.q = v;
    else if (var == "q1") pert.q1 = v;
    else throw ConfigError("sweep variable '" + var + "' does not name a config field");
}

} // namespace detail

/// Run the homotopy over a sweep grid and report the sup-norm window of all
/// converged solutions. Regimes: 0<p<1 or p>2 alpha+1 sweep the full
/// continuation; the intermediate regime is admitted only at a fixed t.
inline BoundsReport bound_sweep(const Grid& g, const GroundState& gs,
                                const KirchhoffParams& prm_base,
                                const PerturbationSpec& pert_base, const SweepSpec& sweep,
                                const HomotopyOptions& opts = {}) {
    prm_base.validate();
    if (sweep.variable == "p")
        throw ConfigError("bound_sweep: sweeping p is not supported (the ground state depends "
                          "on p); use the branch stage for p sweeps");
    BoundsReport rep;
    rep.variable = sweep.variable;
    const bool intermediate = detail::intermediate_regime(prm_base);
    if (intermediate && !sweep.t_fixed)
        throw ConfigError("intermediate regime (1<p<2*alpha+1) sweeps require a fixed t0 > 0; "
                          "uniform-in-t bounds do not exist there");
    if (pert_base.kind == PerturbationSpec::Kind::Superlinear) {
        rep.lambda1 = validate_spectral(g, prm_base, pert_base);
        rep.lambda_margin_min = prm_base.a * rep.lambda1 - pert_base.lambda;
    }

    auto run_cell = [&](double value) -> SweepCell {
        SweepCell cell;
        cell.value = value;
        KirchhoffParams prm = prm_base;
        PerturbationSpec pert = pert_base;
        if (sweep.variable != "t") detail::apply_sweep_value(prm, pert, sweep.variable, value);
        pert.validate(prm.p);

        if (sweep.t_fixed) {
            const double S = gs.S;
            RegimeReport rr = find_roots(prm, S);
            if (rr.roots.empty()) {
                cell.converged = false;
                cell.record.params = prm;
                return cell;
            }
            const double beta = sweep.branch == "lower" ? rr.roots.front() : rr.roots.back();
            const int idx = sweep.branch == "lower" ? 0 : int(rr.roots.size()) - 1;
            SolutionRecord seed = reconstruct(g, gs, beta, prm, idx);
            cell.record = homotopy_step(g, prm, pert, *sweep.t_fixed, seed.u, opts);
        } else {
            Field init = gs.v;
            const double scale = std::pow(prm.a, 1.0 / (prm.p - 1.0));
            for (auto& x : init) x *= scale;  // t = 0 semilinear solution
            auto res = continuation(g, prm, pert, sweep.t_schedule, init, opts);
            if (!res.completed || res.path.empty()) {
                cell.converged = false;
                cell.record.params = prm;
                return cell;
            }
            cell.record = std::move(res.path.back());
        }
        cell.converged = cell.record.status == SolveStatus::Converged;
        return cell;
    };

    if (sweep.variable == "t") {
        // one warm-started pass, sampled at the requested t values
        Field init = gs.v;
        const double scale = std::pow(prm_base.a, 1.0 / (prm_base.p - 1.0));
        for (auto& x : init) x *= scale;
        std::vector<double> schedule = sweep.t_schedule;
        for (double v : sweep.values)
            if (v > 0 && std::none_of(schedule.begin(), schedule.end(),
                                      [&](double s) { return std::abs(s - v) < 1e-12; }))
                schedule.push_back(v);
        std::sort(schedule.begin(), schedule.end());
        auto res = continuation(g, prm_base, pert_base, schedule, init, opts);
        for (double v : sweep.values) {
            SweepCell cell;
            cell.value = v;
            if (v == 0.0) {
                cell.record = homotopy_step(g, prm_base, pert_base, 0.0, init, opts);
            } else {
                for (auto& rec : res.path)
                    if (std::abs(rec.provenance.t - v) < 1e-12) cell.record = rec;
            }
            cell.converged = !cell.record.u.values.empty() &&
                             cell.record.status == SolveStatus::Converged;
            rep.cells.push_back(std::move(cell));
        }
    } else if (sweep.threads > 1 && sweep.values.size() > 1) {
        std::vector<std::future<SweepCell>> futs;
        futs.reserve(sweep.values.size());
        for (double v : sweep.values)
            futs.push_back(std::async(std::launch::async, run_cell, v));
        for (auto& f : futs) rep.cells.push_back(f.get());
    } else {
        for (double v : sweep.values) rep.cells.push_back(run_cell(v));
    }

    rep.sup_min = std::numeric_limits<double>::infinity();
    rep.sup_max = 0;
    for (auto& cell : rep.cells) {
        if (!cell.converged) {
            rep.all_converged = false;
            continue;
        }
        rep.sup_min = std::min(rep.sup_min, cell.record.sup_norm);
        rep.sup_max = std::max(rep.sup_max, cell.record.sup_norm);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// blow-up probe for the two-branch regime

struct BlowupRow {
    double b = 0;
    double y1 = 0, y2 = 0;
    double sup_lower = 0, sup_upper = 0;
    double lower_err = 0;  // sup |u_lower - u_{b=0}|
    bool flagged = false;
};

struct BlowupTable {
    std::vector<BlowupRow> rows;
    double sup_ref = 0;  // b = 0 reconstruction
    bool lower_err_monotone = true;
    bool upper_sup_increasing = true;
    double upper_loglog_slope = std::numeric_limits<double>::quiet_NaN();
    double slope_reference = std::numeric_limits<double>::quiet_NaN();  // -1/gamma
};

/// Reconstruct both branches along a decreasing b sequence: the lower branch
/// converges to the semilinear b = 0 solution, the upper branch blows up
/// like b^{-1/gamma} in sup norm.
inline BlowupTable blowup_probe(const Grid& g, const GroundState& gs, KirchhoffParams prm,
                                const std::vector<double>& b_sequence) {
    prm.validate();
    if (!(prm.p > 1.0 && prm.gamma() > 0))
        throw ConfigError("blowup_probe: requires the two-branch regime 1<p<2*alpha+1");
    BlowupTable tab;
    tab.slope_reference = -1.0 / prm.gamma();

    KirchhoffParams prm0 = prm;
    prm0.b = 0.0;
    const double aS = prm.a * gs.S;
    SolutionRecord ref =
        reconstruct(g, gs, std::pow(aS, 2.0 / (prm.p - 1.0)), prm0, 0);
    tab.sup_ref = ref.sup_norm;

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int nfit = 0;
    for (double b : b_sequence) {
        BlowupRow row;
        row.b = b;
        prm.b = b;
        RegimeReport rr;
        try {
            rr = find_roots(prm, gs.S);
        } catch (const InconsistencyError&) {
            row.flagged = true;
            tab.rows.push_back(row);
            continue;
        }
        if (rr.roots.size() != 2) {
            row.flagged = true;
            tab.rows.push_back(row);
            continue;
        }
        row.y1 = rr.roots[0];
        row.y2 = rr.roots[1];
        SolutionRecord lower = reconstruct(g, gs, row.y1, prm, 0);
        SolutionRecord upper = reconstruct(g, gs, row.y2, prm, 1);
        row.sup_lower = lower.sup_norm;
        row.sup_upper = upper.sup_norm;
        double err = 0;
        for (std::size_t i = 0; i < lower.u.size(); ++i)
            err = std::max(err, std::abs(lower.u[i] - ref.u[i]));
        row.lower_err = err;
        const double x = std::log(b), yv = std::log(row.sup_upper);
        sx += x;
        sy += yv;
        sxx += x * x;
        sxy += x * yv;
        ++nfit;
        tab.rows.push_back(row);
    }

    const BlowupRow* prev = nullptr;
    for (auto& row : tab.rows) {
        if (row.flagged) continue;
        if (prev) {
            if (row.lower_err >= prev->lower_err) tab.lower_err_monotone = false;
            if (row.sup_upper <= prev->sup_upper) tab.upper_sup_increasing = false;
        }
        prev = &row;
    }
    if (nfit >= 3)
        tab.upper_loglog_slope = (nfit * sxy - sx * sy) / (nfit * sxx - sx * sx);
    return tab;
}

} // namespace kirchlab
