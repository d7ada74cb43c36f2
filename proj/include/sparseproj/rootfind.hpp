#pragma once

// Root finding for phi(lambda) = 0.
//
// forward_search sorts and scans breakpoints. bisection, ssnsb and qasb work
// on an unsorted bracket [l, r] with phi(l) > 0 > phi(r). They only touch the
// entries that still lie inside the bracket, so the work per iteration
// shrinks with the bracket.

#include <sparseproj/auxiliary.hpp>
#include <sparseproj/error.hpp>
#include <sparseproj/problem.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sparseproj {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// One iteration of a bracketing solver. Probes a method does not use are NaN.
struct TraceRow {
    std::size_t k = 0;
    std::size_t active_size = 0;  // entries inside [l, r) at the start of the iteration
    double l = kNaN;
    double lower_probe = kNaN;  // lambda_T (ssnsb) or lambda_Q (qasb)
    double midpoint = kNaN;     // next iterate
    double upper_probe = kNaN;  // lambda_S
    double r = kNaN;
};

struct Bracket {
    double l = kNaN;
    double r = kNaN;
    double phi_l = kNaN;
    double phi_r = kNaN;
    BreakpointStats stats_l;  // entries >= l
    BreakpointStats stats_r;  // entries >= r
    ActiveSet active;         // entries in [l, r)
    /// Set when the root was already located while building the bracket.
    std::optional<double> exact_root;
};

struct RootResult {
    double root = kNaN;
    std::size_t iterations = 0;
    std::vector<TraceRow> trace;
    Method method = Method::QASB;
    /// Entries left inside the final bracket.
    std::size_t final_active = 0;
};

struct SolveOptions {
    double tol = 1e-9;
    std::size_t max_iterations = 200;
};

namespace detail {

inline double median3(double a, double b, double c) noexcept {
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    return std::max(a, b);
}

inline void require_radius(std::size_t n, double t) {
    if (n == 0) raise(ErrorCode::DegenerateInput, "empty input vector");
    if (!(t > 0.0) || !std::isfinite(t)) raise(ErrorCode::InvalidRadius, "radius must be positive and finite");
}

/// Fills stats_l, stats_r and the active set of `b` from a full pass over v.
inline void fill_bracket(Bracket& b, std::span<const double> v, double t) {
    std::vector<double> inside;
    BreakpointStats sr{b.r, 0, 0.0, 0.0};
    double sum_in = 0.0;
    double sumsq_in = 0.0;
    for (double x : v) {
        if (x >= b.r) {
            ++sr.count;
            sr.sum += x;
            sr.sumsq += x * x;
        } else if (x >= b.l) {
            inside.push_back(x);
            sum_in += x;
            sumsq_in += x * x;
        }
    }
    b.stats_r = sr;
    b.stats_l = {b.l, sr.count + inside.size(), sr.sum + sum_in, sr.sumsq + sumsq_in};
    b.active = ActiveSet(std::move(inside));
    b.phi_l = eval_phi(b.stats_l, b.l, t);
    b.phi_r = eval_phi(b.stats_r, b.r, t);
}

/// Mutable state shared by the bracketing solvers.
class Search {
public:
    Search(Bracket& b, double t) : b_(b), t_(t) {}

    bool inside(double p) const noexcept { return p > b_.l && p < b_.r; }

    /// Evaluates phi at p in (l, r) and moves whichever end keeps the sign
    /// invariant. Returns phi(p); on 0 the bracket is left untouched.
    double probe(double p) noexcept { return probe(p, b_.active.split(p)); }

    double probe(double p, const ActiveSet::Split& sp) noexcept {
        const auto st = absorb(b_.stats_r, sp, p);
        const double f = eval_phi(st, p, t_);
        if (f > 0.0) {
            b_.l = p;
            b_.phi_l = f;
            b_.stats_l = st;
            b_.active.keep_above();
        } else if (f < 0.0) {
            b_.r = p;
            b_.phi_r = f;
            b_.stats_r = st;
            b_.active.keep_below();
        }
        return f;
    }

    /// Probes p and, when phi(p) < 0, also lo < p, using a single pass over
    /// the active set. Returns phi(p) and phi(lo), the latter NaN when lo was
    /// not needed. The bracket is moved as by probe() for each point.
    std::pair<double, double> probe_with_lower(double p, double lo) noexcept {
        const auto sp = b_.active.split_between(lo, p);
        const auto st = absorb(b_.stats_r, sp.upper, p);
        const double f = eval_phi(st, p, t_);
        if (f > 0.0) {
            b_.l = p;
            b_.phi_l = f;
            b_.stats_l = st;
            b_.active.keep_above();
            return {f, kNaN};
        }
        if (f == 0.0) return {f, kNaN};
        b_.r = p;
        b_.phi_r = f;
        b_.stats_r = st;
        const auto sq = absorb(st, sp.middle, lo);
        const double g = eval_phi(sq, lo, t_);
        if (g > 0.0) {
            b_.l = lo;
            b_.phi_l = g;
            b_.stats_l = sq;
            b_.active.keep_middle();
        } else if (g < 0.0) {
            b_.r = lo;
            b_.phi_r = g;
            b_.stats_r = sq;
            b_.active.keep_lowest();
        } else {
            b_.active.keep_below();
        }
        return {f, g};
    }

    double secant() const noexcept {
        return b_.r - b_.phi_r * (b_.l - b_.r) / (b_.phi_l - b_.phi_r);
    }

    Bracket& bracket() noexcept { return b_; }

private:
    Bracket& b_;
    double t_;
};

inline RootResult exact(const Bracket& b, Method m) {
    RootResult res;
    res.method = m;
    res.root = *b.exact_root;
    return res;
}

/// One bracket update of the hybrid methods: probe `lambda`, then only the
/// bound that survives, `upper` when phi(lambda) > 0 and `lower` otherwise.
/// Returns true when the search is over; `lambda` then holds the root.
inline bool bracket_step(Search& search, double& lambda, double lower, double upper, double tol) noexcept {
    double f;
    if (search.inside(lower) && lower < lambda) {
        const auto [fp, fl] = search.probe_with_lower(lambda, lower);
        f = fp;
        if (fl == 0.0) {
            lambda = lower;
            return true;
        }
    } else {
        f = search.probe(lambda);
    }
    if (std::abs(f) <= tol) return true;
    if (f > 0.0 && search.inside(upper) && search.probe(upper) == 0.0) {
        lambda = upper;
        return true;
    }
    return false;
}

[[noreturn]] inline void non_convergence(Method m, std::size_t cap) {
    raise(ErrorCode::NonConvergence,
          std::string(to_string(m)) + ": no convergence after " + std::to_string(cap) + " iterations");
}

}  // namespace detail

/// Root of psi on (-inf, v_max). Pivot-based breakpoint search: each
/// round partitions the remaining candidates around a pivot, decides on which
/// side of the pivot the root lies and discards the other side. Once every
/// entry is classified the root is (s - t) / I over the entries above it.
inline double psi_root(std::span<const double> v, double t) {
    detail::require_radius(v.size(), t);
    std::vector<double> cand(v.begin(), v.end());
    std::size_t lo = 0;
    std::size_t hi = cand.size();
    std::size_t count = 0;
    double sum = 0.0;
    while (lo < hi) {
        const double p = detail::median3(cand[lo], cand[lo + (hi - lo) / 2], cand[hi - 1]);
        // [lo, lt) < p, [lt, gt) == p, [gt, hi) > p
        std::size_t lt = lo, i = lo, gt = hi;
        double above = 0.0;
        while (i < gt) {
            const double x = cand[i];
            if (x < p) {
                std::swap(cand[lt++], cand[i++]);
            } else if (x > p) {
                above += x;
                std::swap(cand[i], cand[--gt]);
            } else {
                ++i;
            }
        }
        const double c = static_cast<double>(count + (hi - gt));
        const double psi = (sum + above) - c * p - t;
        if (psi > 0.0) {
            lo = gt;
        } else if (psi < 0.0) {
            count += hi - lt;
            sum += above + static_cast<double>(gt - lt) * p;
            hi = lt;
        } else {
            return p;
        }
    }
    return (sum - t) / static_cast<double>(count);
}

/// Bracket (lambda_tilde, lambda_hat) for nonnegative v with ||v||_1 > t,
/// ||v||_1 > t ||v||_2 and ||(v - lambda_hat)^+||_2 > 1, where lambda_hat is
/// the psi root and lambda_tilde = (||v||_1 - t ||v||_2) / n.
inline Bracket initial_bracket(std::span<const double> v, double t) {
    detail::require_radius(v.size(), t);
    double l1 = 0.0;
    double sq = 0.0;
    for (double x : v) {
        if (x < 0.0) raise(ErrorCode::PreconditionFailed, "initial_bracket: v must be nonnegative");
        l1 += x;
        sq += x * x;
    }
    const double l2 = std::sqrt(sq);
    if (!(l1 > t)) raise(ErrorCode::PreconditionFailed, "initial_bracket: requires ||v||_1 > t");
    if (!(l1 > t * l2)) raise(ErrorCode::PreconditionFailed, "initial_bracket: requires ||v||_1 > t ||v||_2");
    const double hat = psi_root(v, t);
    double shrunk = 0.0;
    for (double x : v) {
        const double d = std::max(x - hat, 0.0);
        shrunk += d * d;
    }
    if (!(std::sqrt(shrunk) > 1.0))
        raise(ErrorCode::PreconditionFailed, "initial_bracket: requires ||(v - lambda_hat)^+||_2 > 1");

    Bracket b;
    b.l = (l1 - t * l2) / static_cast<double>(v.size());
    b.r = hat;
    detail::fill_bracket(b, v, t);
    if (!(b.phi_l > 0.0) || !(b.phi_r < 0.0) || !(b.l < b.r))
        raise(ErrorCode::PreconditionFailed, "initial_bracket: sign conditions lost to rounding");
    return b;
}

/// Bracket for any v with I_1 < t^2 < n. The left end is the smaller root of
/// the last (all-entries) piece, which never exceeds the root; the right end
/// is the midpoint of the two largest distinct values, where phi < 0.
inline Bracket general_bracket(std::span<const double> v, double t) {
    detail::require_radius(v.size(), t);
    const double t2 = t * t;
    const auto [top, vmax] = count_max(v);
    if (compare_count(top, t2) >= 0) raise(ErrorCode::NoRoot, "general_bracket: I_1 >= t^2, phi has no isolated root");
    if (top == v.size()) raise(ErrorCode::DegenerateInput, "general_bracket: v has a single distinct value");
    if (compare_count(v.size(), t2) <= 0) raise(ErrorCode::InvalidRadius, "general_bracket: requires t < sqrt(n)");

    const auto full = compute_stats(v, -std::numeric_limits<double>::infinity());
    double second = -std::numeric_limits<double>::infinity();
    double vmin = std::numeric_limits<double>::infinity();
    for (double x : v) {
        if (x < vmax) second = std::max(second, x);
        vmin = std::min(vmin, x);
    }

    Bracket b;
    const double l = piece_smaller_root(full, t);
    if (l <= vmin) {
        // Root lies on the last piece, which is exactly the quadratic solved.
        b.l = b.r = l;
        b.exact_root = l;
        return b;
    }
    b.l = l;
    b.r = 0.5 * (vmax + second);
    detail::fill_bracket(b, v, t);
    if (!(b.phi_l > 0.0)) {
        b.exact_root = l;
        return b;
    }
    if (!(b.phi_r < 0.0)) raise(ErrorCode::PreconditionFailed, "general_bracket: phi(r) < 0 lost to rounding");
    return b;
}

/// initial_bracket when its hypotheses hold, general_bracket otherwise.
inline Bracket make_bracket(std::span<const double> v, double t) {
    const bool nonneg = std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0; });
    if (nonneg) {
        try {
            return initial_bracket(v, t);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::PreconditionFailed) throw;
        }
    }
    return general_bracket(v, t);
}

/// Sorted breakpoint scan. Exact up to rounding; `iterations` counts the
/// phi evaluations made during the scan.
inline RootResult forward_search(std::span<const double> v, double t) {
    detail::require_radius(v.size(), t);
    const std::size_t n = v.size();
    const double t2 = t * t;
    const auto [top, vmax] = count_max(v);
    (void)vmax;
    if (compare_count(top, t2) >= 0) raise(ErrorCode::NoRoot, "forward_search: I_1 >= t^2");
    if (compare_count(n, t2) <= 0) raise(ErrorCode::InvalidRadius, "forward_search: requires t < sqrt(n)");

    std::vector<double> u(v.begin(), v.end());
    std::sort(u.begin(), u.end(), std::greater<>());

    const std::size_t jt = ceil_count(t2);
    double s = 0.0;
    double w = 0.0;
    for (std::size_t i = 0; i < jt; ++i) {
        s += u[i];
        w += u[i] * u[i];
    }
    RootResult res;
    res.method = Method::FS;
    std::size_t jstar = n;
    // u is 0-based: u[j] is the (j+1)-th largest entry.
    for (std::size_t j = jt; j < n; ++j) {
        const double next = u[j];
        s += next;
        w += next * next;
        if (next < u[j - 1]) {
            const double m = static_cast<double>(j + 1);
            const double phi = (m - t2) * (m * next - 2.0 * s) * next + s * s - t2 * w;
            ++res.iterations;
            if (phi >= 0.0) {
                jstar = j;
                s -= next;
                w -= next * next;
                break;
            }
        }
    }
    const double js = static_cast<double>(jstar);
    const double spread = std::max(0.0, js * w - s * s);
    res.root = (s - t * std::sqrt(spread / (js - t2))) / js;
    return res;
}

/// Midpoint halving on a bracket.
inline RootResult bisection(std::span<const double> v, double t, Bracket b, const SolveOptions& opt = {}) {
    (void)v;
    if (b.exact_root) return detail::exact(b, Method::BM);
    RootResult res;
    res.method = Method::BM;
    detail::Search search(b, t);
    for (;;) {
        const double mid = 0.5 * (b.l + b.r);
        if (b.r - b.l <= opt.tol) {
            res.root = mid;
            break;
        }
        if (res.iterations >= opt.max_iterations) detail::non_convergence(Method::BM, opt.max_iterations);
        TraceRow row{res.iterations, b.active.size(), b.l, kNaN, mid, kNaN, b.r};
        const double f = search.probe(mid);
        ++res.iterations;
        res.trace.push_back(row);
        if (std::abs(f) <= opt.tol) {
            res.root = mid;
            break;
        }
    }
    res.final_active = b.active.size();
    return res;
}

/// Semi-smooth Newton / secant / bisection hybrid. Each iteration forms the
/// secant root lambda_S (phi < 0 there) and the tangent root lambda_T at l
/// (phi > 0 there) and probes their midpoint lambda. The bracket becomes
/// (lambda, lambda_S) when phi(lambda) > 0 and (lambda_T, lambda) otherwise,
/// so only the surviving end is evaluated, on the entries left after the
/// midpoint split.
inline RootResult ssnsb(std::span<const double> v, double t, Bracket b, const SolveOptions& opt = {}) {
    (void)v;
    if (b.exact_root) return detail::exact(b, Method::SSNSB);
    RootResult res;
    res.method = Method::SSNSB;
    detail::Search search(b, t);
    double lambda = kNaN;
    for (;;) {
        if (b.r - b.l <= opt.tol) break;
        if (res.iterations >= opt.max_iterations) detail::non_convergence(Method::SSNSB, opt.max_iterations);
        TraceRow row{res.iterations, b.active.size(), b.l, kNaN, kNaN, kNaN, b.r};
        ++res.iterations;

        const double lam_s = search.secant();
        const double slope = eval_phi_subderiv(b.stats_l, b.l, t);
        // A flat subgradient falls back to the bracket midpoint for this step.
        const double lam_t = slope < 0.0 ? b.l - b.phi_l / slope : 0.5 * (b.l + b.r);
        row.upper_probe = lam_s;
        row.lower_probe = lam_t;
        lambda = 0.5 * (lam_s + lam_t);
        if (!search.inside(lambda)) lambda = 0.5 * (b.l + b.r);
        row.midpoint = lambda;
        res.trace.push_back(row);
        if (detail::bracket_step(search, lambda, lam_t, lam_s, opt.tol)) break;
    }
    res.root = std::isnan(lambda) || lambda < b.l || lambda > b.r ? 0.5 * (b.l + b.r) : lambda;
    res.final_active = b.active.size();
    return res;
}

/// Quadratic-approximation / secant / bisection hybrid. The lower probe is
/// the smaller root lambda_Q of the quadratic piece at l; when no entry lies
/// in [l, lambda_Q) that piece is the one holding the root and lambda_Q is
/// returned as is. Otherwise the midpoint of lambda_Q and lambda_S is probed
/// and the bracket becomes (lambda, lambda_S) or (lambda_Q, lambda).
inline RootResult qasb(std::span<const double> v, double t, Bracket b, const SolveOptions& opt = {}) {
    (void)v;
    if (b.exact_root) return detail::exact(b, Method::QASB);
    RootResult res;
    res.method = Method::QASB;
    detail::Search search(b, t);
    double lambda = kNaN;

    auto smaller_root_at_l = [&]() {
        try {
            return piece_smaller_root(b.stats_l, t);
        } catch (const Error&) {
            return kNaN;
        }
    };

    for (;;) {
        if (b.r - b.l <= opt.tol) break;
        const double lam_q = smaller_root_at_l();
        if (b.active.empty() && search.inside(lam_q)) {
            // [l, r) holds no entry: phi is a single quadratic on the bracket.
            lambda = lam_q;
            break;
        }
        if (res.iterations >= opt.max_iterations) detail::non_convergence(Method::QASB, opt.max_iterations);
        TraceRow row{res.iterations, b.active.size(), b.l, lam_q, kNaN, kNaN, b.r};
        ++res.iterations;

        const double lam_s = search.secant();
        row.upper_probe = lam_s;
        if (search.inside(lam_q) && !b.active.any_below(lam_q)) {
            lambda = lam_q;
            row.midpoint = lam_q;
            res.trace.push_back(row);
            // Final bracket [l, lambda_Q] holds no entries.
            b.active.split(lam_q);
            b.active.keep_below();
            break;
        }
        lambda = 0.5 * (lam_s + lam_q);
        if (!search.inside(lambda)) lambda = 0.5 * (b.l + b.r);
        row.midpoint = lambda;
        res.trace.push_back(row);
        if (detail::bracket_step(search, lambda, lam_q, lam_s, opt.tol)) break;
    }
    res.root = std::isnan(lambda) ? 0.5 * (b.l + b.r) : lambda;
    res.final_active = b.active.size();
    return res;
}

inline RootResult run_bracketed(Method m, std::span<const double> v, double t, Bracket b, const SolveOptions& opt = {}) {
    switch (m) {
        case Method::BM: return bisection(v, t, std::move(b), opt);
        case Method::SSNSB: return ssnsb(v, t, std::move(b), opt);
        case Method::QASB: return qasb(v, t, std::move(b), opt);
        case Method::FS: break;
    }
    return forward_search(v, t);
}

/// Solves phi(lambda) = 0 with the chosen method, building the bracket as
/// needed. Requires I_1 < t^2 < n.
inline RootResult solve_phi_root(std::span<const double> v, double t, Method m, const SolveOptions& opt = {}) {
    if (m == Method::FS) return forward_search(v, t);
    return run_bracketed(m, v, t, make_bracket(v, t), opt);
}

/// Recomputes the root from the entries above `lambda` in centered form,
/// m - t sqrt(ss / (I (I - t^2))) with m the mean and ss the centered sum of
/// squares. This equals the piece's smaller root but avoids the cancellation
/// in I w - s^2 when the active entries are close together. The input is
/// returned unchanged when the result would leave the piece.
inline double polish_root(std::span<const double> v, double t, double lambda) {
    const double t2 = t * t;
    double count = 0.0;
    double sum = 0.0;
    double below = -std::numeric_limits<double>::infinity();
    for (double x : v) {
        if (x > lambda) {
            count += 1.0;
            sum += x;
        } else {
            below = std::max(below, x);
        }
    }
    if (count == 0.0 || !(count > t2)) return lambda;
    const double mean = sum / count;
    double ss = 0.0;
    double lowest = std::numeric_limits<double>::infinity();
    for (double x : v) {
        if (x > lambda) {
            ss += (x - mean) * (x - mean);
            lowest = std::min(lowest, x);
        }
    }
    const double refined = mean - t * std::sqrt(ss / (count * (count - t2)));
    if (!(refined >= below) || !(refined < lowest)) return lambda;
    return refined;
}

}  // namespace sparseproj
