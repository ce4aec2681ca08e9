#pragma once

// Exact analysis of the branch equation
//     f(y) = y^{(p-1)/2} - b S y^alpha - a S,   y > 0,
// whose positive roots beta parameterize Kirchhoff solutions through
// u = (a + b beta^alpha)^{1/(p-1)} v. Regime classification, guaranteed
// root brackets, and the b -> 0 asymptotics live here.
//
// Roots are located and stored in extended precision. Near a root the two
// leading terms cancel, so |f| at the best double-rounded root is pinned at
// |f' y| * eps_double / 2 -- above the 1e-10 * max(aS, 1) residual gate once
// the terms exceed ~1e5 * max(aS, 1). The extended-precision root keeps the
// gate meaningful across the full sampled magnitude range.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "kirchlab/errors.hpp"

namespace kirchlab {

struct KirchhoffParams {
    double a = 1.0;      // > 0
    double b = 0.0;      // >= 0 (0 admitted only as the semilinear limit)
    double alpha = 1.0;  // > 0
    double p = 2.0;      // > 0, != 1

    double gamma() const { return 2.0 * alpha + 1.0 - p; }

    void validate() const {
        if (!(a > 0)) throw ConfigError("params: a must be > 0");
        if (!(b >= 0)) throw ConfigError("params: b must be >= 0");
        if (!(alpha > 0)) throw ConfigError("params: alpha must be > 0");
        if (!(p > 0)) throw ConfigError("params: p must be > 0");
        if (std::abs(p - 1.0) < 1e-12) throw ConfigError("params: p = 1 is excluded");
    }
};

enum class CaseLabel { Sublinear, TwoBranch, Supercritical, Resonant };

inline const char* case_name(CaseLabel c) {
    switch (c) {
        case CaseLabel::Sublinear: return "sublinear";
        case CaseLabel::TwoBranch: return "two-branch";
        case CaseLabel::Supercritical: return "supercritical";
        case CaseLabel::Resonant: return "resonant";
    }
    return "?";
}

struct RegimeReport {
    CaseLabel label = CaseLabel::Sublinear;
    double threshold_lhs = 0;  // a b^{(p-1)/gamma}, two-branch case only
    double threshold_rhs = 0;  // gamma [ (p-1)^{p-1} / (2 alpha S)^{2 alpha} ]^{1/gamma}
    std::optional<long double> y0;  // critical point of f
    int predicted_count = 0;
    std::vector<long double> roots;  // sorted ascending
    bool semilinear_limit = false;   // b == 0
};

inline constexpr double kEqTol = 1e-9;  // relative tolerance for the equality cases

namespace detail {

inline long double eval_f_l(long double y, const KirchhoffParams& prm, long double S) {
    const long double lead = powl(y, (long double)(prm.p - 1.0) / 2.0L);
    const long double mid = (long double)prm.b * S * powl(y, (long double)prm.alpha);
    return lead - mid - (long double)prm.a * S;
}

inline long double eval_fprime_l(long double y, const KirchhoffParams& prm, long double S) {
    const long double lead =
        (long double)(prm.p - 1.0) / 2.0L * powl(y, (long double)(prm.p - 3.0) / 2.0L);
    const long double mid = (long double)prm.alpha * (long double)prm.b * S *
                            powl(y, (long double)(prm.alpha - 1.0));
    return lead - mid;
}

} // namespace detail

inline double eval_f(double y, const KirchhoffParams& prm, double S) {
    if (!(y > 0)) throw DomainError("eval_f: y must be > 0");
    if (!(S > 0)) throw DomainError("eval_f: S must be > 0");
    return double(detail::eval_f_l(y, prm, S));
}

inline long double eval_f(long double y, const KirchhoffParams& prm, double S) {
    if (!(y > 0)) throw DomainError("eval_f: y must be > 0");
    if (!(S > 0)) throw DomainError("eval_f: S must be > 0");
    return detail::eval_f_l(y, prm, S);
}

/// f'(y) = y^{alpha-1} ( (p-1)/2 y^{-gamma/2} - alpha b S )
inline double eval_fprime(double y, const KirchhoffParams& prm, double S) {
    if (!(y > 0)) throw DomainError("eval_fprime: y must be > 0");
    if (!(S > 0)) throw DomainError("eval_fprime: S must be > 0");
    return double(detail::eval_fprime_l(y, prm, S));
}

/// Unique critical point y0 = ((p-1)/(2 alpha b S))^{2/gamma}; absent for
/// 0 < p < 1 (f strictly decreasing), the resonant exponent, or b = 0.
inline std::optional<long double> critical_point(const KirchhoffParams& prm, double S) {
    if (prm.p < 1.0 || prm.b == 0.0) return std::nullopt;
    const double g = prm.gamma();
    if (std::abs(g) <= kEqTol * std::max(1.0, 2.0 * prm.alpha + 1.0)) return std::nullopt;
    const long double ratio = (long double)(prm.p - 1.0) /
                              (2.0L * (long double)prm.alpha * (long double)prm.b * (long double)S);
    return powl(ratio, 2.0L / (long double)g);
}

inline RegimeReport classify_regime(const KirchhoffParams& prm, double S) {
    prm.validate();
    if (!(S > 0)) throw DomainError("classify_regime: S must be > 0");
    RegimeReport rep;
    const double g = prm.gamma();
    const bool resonant = std::abs(g) <= kEqTol * std::max(1.0, 2.0 * prm.alpha + 1.0);

    if (prm.p < 1.0)
        rep.label = CaseLabel::Sublinear;
    else if (resonant)
        rep.label = CaseLabel::Resonant;
    else
        rep.label = g > 0 ? CaseLabel::TwoBranch : CaseLabel::Supercritical;

    if (prm.b == 0.0) {
        // pure semilinear limit: f(y) = y^{(p-1)/2} - aS has exactly one root
        rep.semilinear_limit = true;
        rep.predicted_count = 1;
        return rep;
    }

    switch (rep.label) {
        case CaseLabel::Sublinear:
            rep.predicted_count = 1;  // f strictly decreases from +inf to -inf
            break;
        case CaseLabel::Resonant: {
            const double bS = prm.b * S;
            rep.predicted_count = bS < 1.0 ? 1 : 0;
            break;
        }
        case CaseLabel::TwoBranch: {
            rep.y0 = critical_point(prm, S);
            const long double lhs =
                (long double)prm.a *
                powl((long double)prm.b, (long double)(prm.p - 1.0) / (long double)g);
            const long double rhs =
                (long double)g *
                expl(((long double)(prm.p - 1.0) * logl((long double)(prm.p - 1.0)) -
                      2.0L * (long double)prm.alpha *
                          logl(2.0L * (long double)prm.alpha * (long double)S)) /
                     (long double)g);
            rep.threshold_lhs = double(lhs);
            rep.threshold_rhs = double(rhs);
            if (std::abs(rep.threshold_lhs - rep.threshold_rhs) <=
                kEqTol * std::max(rep.threshold_lhs, rep.threshold_rhs))
                rep.predicted_count = 1;  // tangency
            else
                rep.predicted_count = rep.threshold_lhs < rep.threshold_rhs ? 2 : 0;
            break;
        }
        case CaseLabel::Supercritical:
            rep.y0 = critical_point(prm, S);
            rep.predicted_count = 1;
            break;
    }
    return rep;
}

inline double default_root_tol(const KirchhoffParams& prm, double S) {
    return 2e-11 * std::max(prm.a * S, 1.0);
}

namespace detail {

// geometric bisection on a bracketed sign change, then Newton polish
inline long double bisect_root(const KirchhoffParams& prm, double S, long double lo,
                               long double hi, double f_tol) {
    const bool lo_positive = eval_f_l(lo, prm, S) > 0;
    long double best = lo;
    long double fbest = fabsl(eval_f_l(lo, prm, S));
    for (int it = 0; it < 500; ++it) {
        const long double mid = sqrtl(lo) * sqrtl(hi);
        const long double fm = eval_f_l(mid, prm, S);
        if (fabsl(fm) < fbest) {
            fbest = fabsl(fm);
            best = mid;
        }
        if ((fm > 0) == lo_positive)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-17L * mid) break;
    }
    for (int it = 0; it < 6; ++it) {  // Newton polish inside the residual floor
        const long double fp = eval_fprime_l(best, prm, S);
        if (fp == 0.0L) break;
        const long double cand = best - eval_f_l(best, prm, S) / fp;
        if (!(cand > lo * 0.5L && cand < hi * 2.0L) || !(cand > 0.0L)) break;
        const long double fc = fabsl(eval_f_l(cand, prm, S));
        if (fc >= fbest) break;
        best = cand;
        fbest = fc;
    }
    if (double(fbest) > f_tol)
        throw ConvergenceError("find_roots: |f| at refined root above tolerance",
                               double(fbest));
    return best;
}

// expand multiplicatively from seed until pred(f(y)) holds
template <typename Pred>
inline long double expand_until(const KirchhoffParams& prm, double S, long double seed,
                                long double factor, Pred pred, const char* what) {
    long double y = seed;
    for (int k = 0; k <= 200; ++k) {  // 2^200 cap
        if (pred(eval_f_l(y, prm, S))) return y;
        y *= factor;
    }
    throw InconsistencyError(std::string("find_roots: bracket expansion cap hit (") + what +
                             "); parameters sit on a classification boundary");
}

} // namespace detail

/// Roots of f with guaranteed brackets per regime. The root count must match
/// the classification or an InconsistencyError is thrown.
inline RegimeReport find_roots(const KirchhoffParams& prm, double S, double root_tol) {
    RegimeReport rep = classify_regime(prm, S);
    if (!(root_tol > 0)) throw ConfigError("find_roots: root_tol must be > 0");
    const long double aS = (long double)prm.a * (long double)S;
    const long double bS = (long double)prm.b * (long double)S;

    auto push_closed_form = [&](long double y) {
        if (double(fabsl(detail::eval_f_l(y, prm, S))) > root_tol)
            throw ConvergenceError("find_roots: closed-form root fails |f| <= tol",
                                   double(fabsl(detail::eval_f_l(y, prm, S))));
        rep.roots.push_back(y);
    };

    if (rep.semilinear_limit) {
        push_closed_form(powl(aS, 2.0L / (long double)(prm.p - 1.0)));
        return rep;
    }

    switch (rep.label) {
        case CaseLabel::Sublinear: {
            // f falls from +inf to -inf; seed near the dominant balances
            const long double y_a = powl(aS, 2.0L / (long double)(prm.p - 1.0));
            const long double y_b = powl(bS, -2.0L / (long double)prm.gamma());
            const long double lo =
                detail::expand_until(prm, S, std::min(y_a, y_b), 0.5L,
                                     [](long double f) { return f > 0; }, "sublinear low");
            const long double hi =
                detail::expand_until(prm, S, std::max(y_a, y_b), 2.0L,
                                     [](long double f) { return f < 0; }, "sublinear high");
            rep.roots.push_back(detail::bisect_root(prm, S, lo, hi, root_tol));
            break;
        }
        case CaseLabel::Resonant: {
            if (rep.predicted_count == 1)
                push_closed_form(powl(aS / (1.0L - bS), 1.0L / (long double)prm.alpha));
            break;
        }
        case CaseLabel::TwoBranch: {
            const long double y0 = *rep.y0;
            const long double f0 = detail::eval_f_l(y0, prm, S);
            if (rep.predicted_count == 0) {
                if (f0 > 0)
                    throw InconsistencyError(
                        "find_roots: classification says no roots but f(y0) > 0");
                break;
            }
            if (rep.predicted_count == 1) {  // tangency: the root is y0 itself
                if (double(fabsl(f0)) > root_tol)
                    throw InconsistencyError("find_roots: tangency root fails |f(y0)| <= tol");
                rep.roots.push_back(y0);
                break;
            }
            if (f0 <= 0)
                throw InconsistencyError(
                    "find_roots: classification says two roots but f(y0) <= 0");
            const long double lo =
                detail::expand_until(prm, S, y0 * 0.5L, 0.5L,
                                     [](long double f) { return f < 0; }, "two-branch low");
            rep.roots.push_back(detail::bisect_root(prm, S, lo, y0, root_tol));
            const long double hi =
                detail::expand_until(prm, S, y0 * 2.0L, 2.0L,
                                     [](long double f) { return f < 0; }, "two-branch high");
            rep.roots.push_back(detail::bisect_root(prm, S, y0, hi, root_tol));
            break;
        }
        case CaseLabel::Supercritical: {
            // f < 0 on (0, y0]; one crossing beyond
            const long double y0 = *rep.y0;
            const long double y_a = powl(aS, 2.0L / (long double)(prm.p - 1.0));
            const long double hi =
                detail::expand_until(prm, S, std::max(y0, y_a), 2.0L,
                                     [](long double f) { return f > 0; }, "supercritical high");
            const long double lo =
                detail::expand_until(prm, S, std::min(y0, hi * 0.5L), 0.5L,
                                     [](long double f) { return f < 0; }, "supercritical low");
            rep.roots.push_back(detail::bisect_root(prm, S, lo, hi, root_tol));
            break;
        }
    }

    if (int(rep.roots.size()) != rep.predicted_count)
        throw InconsistencyError("find_roots: found " + std::to_string(rep.roots.size()) +
                                 " roots, classification predicts " +
                                 std::to_string(rep.predicted_count));
    return rep;
}

inline RegimeReport find_roots(const KirchhoffParams& prm, double S) {
    return find_roots(prm, S, default_root_tol(prm, S));
}

// ---------------------------------------------------------------------------
// b -> 0 asymptotics

struct AsymptoticRow {
    double b = 0;
    RegimeReport report;
    bool flagged = false;  // regime exited the expected root pattern
};

struct AsymptoticTable {
    std::vector<AsymptoticRow> rows;
    double y1_limit = 0;            // (aS)^{2/(p-1)}
    std::vector<double> y1_abs_err; // |y1 - limit| per unflagged row
    bool y1_err_monotone = true;
    double y2_loglog_slope = std::nan("");
    double slope_reference = std::nan("");  // -2/gamma
    int two_root_rows = 0;
};

/// Track roots along a decreasing b sequence: the lower root approaches the
/// semilinear value (aS)^{2/(p-1)}, the upper root escapes like (bS)^{-2/gamma},
/// the critical point y0 grows without bound.
inline AsymptoticTable asymptotic_b_to_zero(KirchhoffParams prm, double S,
                                            const std::vector<double>& b_sequence) {
    AsymptoticTable tab;
    const long double limit =
        powl((long double)prm.a * (long double)S, 2.0L / (long double)(prm.p - 1.0));
    tab.y1_limit = double(limit);
    if (prm.p > 1.0 && prm.gamma() > 0) tab.slope_reference = -2.0 / prm.gamma();

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double b : b_sequence) {
        AsymptoticRow row;
        row.b = b;
        prm.b = b;
        try {
            row.report = find_roots(prm, S);
        } catch (const InconsistencyError&) {
            row.flagged = true;
            tab.rows.push_back(row);
            continue;
        }
        if (row.report.roots.empty()) row.flagged = true;
        if (!row.flagged) {
            tab.y1_abs_err.push_back(double(fabsl(row.report.roots.front() - limit)));
            if (row.report.roots.size() == 2) {
                ++tab.two_root_rows;
                const double x = std::log(b);
                const double yv = double(logl(row.report.roots.back()));
                sx += x;
                sy += yv;
                sxx += x * x;
                sxy += x * yv;
            }
        }
        tab.rows.push_back(row);
    }
    for (std::size_t i = 1; i < tab.y1_abs_err.size(); ++i)
        if (tab.y1_abs_err[i] >= tab.y1_abs_err[i - 1]) tab.y1_err_monotone = false;
    if (tab.two_root_rows >= 3) {
        const double n = tab.two_root_rows;
        tab.y2_loglog_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return tab;
}

} // namespace kirchlab
