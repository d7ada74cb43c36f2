#pragma once

// Breakpoint statistics and the two auxiliary functions
//
//   psi(lambda) = ||(v - lambda 1)^+||_1 - t
//   phi(lambda) = ||(v - lambda 1)^+||_1^2 - t^2 ||(v - lambda 1)^+||_2^2
//
// phi is piecewise quadratic in lambda with breakpoints at the distinct
// entries of v. On each piece it is fully described by the count, sum and
// sum of squares of the entries >= lambda, which is what BreakpointStats
// carries.

#include <sparseproj/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace sparseproj {

/// Count / sum / sum of squares of the entries v_i >= anchor.
struct BreakpointStats {
    double anchor = std::numeric_limits<double>::infinity();
    std::size_t count = 0;
    double sum = 0.0;
    double sumsq = 0.0;
};

/// Three-way comparison of an integer count against t^2. Equality is
/// accepted within a relative 1e-12 of t^2 so that radii such as sqrt(2)
/// hit the knife-edge cases.
inline int compare_count(std::size_t count, double t2) noexcept {
    const double c = static_cast<double>(count);
    if (std::abs(c - t2) <= 1e-12 * std::max(1.0, std::abs(t2))) return 0;
    return c < t2 ? -1 : 1;
}

/// Smallest integer m with m >= t^2 under the same guard as compare_count.
inline std::size_t ceil_count(double t2) noexcept {
    const double r = std::round(t2);
    if (std::abs(r - t2) <= 1e-12 * std::max(1.0, std::abs(t2))) return static_cast<std::size_t>(r);
    return static_cast<std::size_t>(std::ceil(t2));
}

inline double eval_psi(std::span<const double> v, double lambda, double t) noexcept {
    double acc = 0.0;
    for (double x : v) acc += std::max(x - lambda, 0.0);
    return acc - t;
}

inline BreakpointStats compute_stats(std::span<const double> v, double lambda) noexcept {
    BreakpointStats st;
    st.anchor = lambda;
    for (double x : v) {
        if (x >= lambda) {
            ++st.count;
            st.sum += x;
            st.sumsq += x * x;
        }
    }
    return st;
}

/// (I - t^2)(I lambda - 2 s) lambda + s^2 - t^2 w, evaluated with the stats of
/// the piece that contains lambda.
inline double eval_phi(const BreakpointStats& st, double lambda, double t) noexcept {
    const double I = static_cast<double>(st.count);
    const double t2 = t * t;
    return (I - t2) * (I * lambda - 2.0 * st.sum) * lambda + st.sum * st.sum - t2 * st.sumsq;
}

inline double eval_phi(std::span<const double> v, double lambda, double t) noexcept {
    return eval_phi(compute_stats(v, lambda), lambda, t);
}

/// Derivative of the active quadratic piece. At a breakpoint left of the
/// concave region this is a subgradient of phi.
inline double eval_phi_subderiv(const BreakpointStats& st, double lambda, double t) noexcept {
    const double I = static_cast<double>(st.count);
    return 2.0 * (I - t * t) * (I * lambda - st.sum);
}

/// Smaller root of the quadratic piece described by `st`.
///
/// A single-entry piece is a concave parabola with a double root at the
/// entry itself, which is returned. Otherwise the piece must have more than
/// t^2 entries: fewer means the piece never crosses zero (NoRoot), exactly t^2
/// means it is the constant s^2 - t^2 w (Degenerate).
inline double piece_smaller_root(const BreakpointStats& st, double t) {
    if (st.count == 0) raise(ErrorCode::Degenerate, "piece_smaller_root: empty piece");
    if (st.count == 1) return st.sum;
    const double t2 = t * t;
    const int cmp = compare_count(st.count, t2);
    if (cmp < 0) raise(ErrorCode::NoRoot, "piece_smaller_root: piece has fewer than t^2 entries");
    if (cmp == 0) raise(ErrorCode::Degenerate, "piece_smaller_root: piece is constant (count == t^2)");
    const double I = static_cast<double>(st.count);
    const double spread = std::max(0.0, I * st.sumsq - st.sum * st.sum);
    return (st.sum - t * std::sqrt(spread / (I - t2))) / I;
}

/// Unordered pool of candidate entries that still lie inside the working
/// interval [l, r) of a root search. Entries are kept by value. A split is
/// a read-only pass that accumulates sums; narrowing to one side is a second,
/// in-place compaction pass. Both are branch-free.
class ActiveSet {
public:
    ActiveSet() = default;
    explicit ActiveSet(std::vector<double> values)
        : data_(std::move(values)), end_(data_.size()) {}

    std::size_t size() const noexcept { return end_; }
    bool empty() const noexcept { return end_ == 0; }

    /// The entries, in unspecified order.
    std::span<const double> values() const noexcept { return {data_.data(), end_}; }

    /// Sums of the entries >= lambda, result of the last split().
    struct Split {
        std::size_t below = 0;  // entries < lambda
        std::size_t above = 0;  // entries >= lambda
        double sum = 0.0;       // over entries >= lambda
        double sumsq = 0.0;
    };

    /// Accumulates the entries >= lambda. Follow with keep_below() or
    /// keep_above().
    Split split(double lambda) noexcept { return split_between(lambda, lambda).upper; }

    struct Split3 {
        Split upper;   // entries >= hi
        Split middle;  // entries in [lo, hi); its `below` counts entries < lo
    };

    /// Accumulates both the entries >= hi and those in [lo, hi), lo <= hi.
    /// keep_below() and keep_above() then refer to hi, keep_middle() keeps
    /// [lo, hi) and keep_lowest() keeps the entries below lo.
    Split3 split_between(double lo, double hi) noexcept {
        // Two interleaved sets of local accumulators keep the sums in
        // registers and halve the length of each floating-point add chain.
        // Multiplying by a 0/1 flag keeps the compiler from branching.
        std::size_t n_up = 0;
        std::size_t n_mid = 0;
        struct Acc {
            double sum = 0.0, sumsq = 0.0, mid_sum = 0.0, mid_sumsq = 0.0;
        };
        Acc a0, a1;
        const auto add = [&](double x, Acc& a) {
            const bool up = x >= hi;
            const bool mid = static_cast<bool>(!up & (x >= lo));
            n_up += up;
            n_mid += mid;
            const double xu = static_cast<double>(up) * x;
            const double xm = static_cast<double>(mid) * x;
            a.sum += xu;
            a.sumsq += xu * xu;
            a.mid_sum += xm;
            a.mid_sumsq += xm * xm;
        };
        std::size_t i = 0;
        for (; i + 1 < end_; i += 2) {
            const double x0 = data_[i];
            const double x1 = data_[i + 1];
            add(x0, a0);
            add(x1, a1);
        }
        if (i < end_) add(data_[i], a0);
        lo_ = lo;
        hi_ = hi;
        Split3 out;
        out.upper.sum = a0.sum + a1.sum;
        out.upper.sumsq = a0.sumsq + a1.sumsq;
        out.middle.sum = a0.mid_sum + a1.mid_sum;
        out.middle.sumsq = a0.mid_sumsq + a1.mid_sumsq;
        out.upper.above = n_up;
        out.upper.below = end_ - n_up;
        out.middle.above = n_mid;
        out.middle.below = out.upper.below - n_mid;
        return out;
    }

    void keep_below() noexcept { compact(-kInf, hi_); }
    void keep_above() noexcept { compact(hi_, kInf); }
    void keep_middle() noexcept { compact(lo_, hi_); }
    void keep_lowest() noexcept { compact(-kInf, lo_); }

    /// True if some entry lies in the open interval (lo, hi).
    bool any_between(double lo, double hi) const noexcept {
        for (double x : values())
            if (x > lo && x < hi) return true;
        return false;
    }

    /// True if some entry is below lambda. Stops at the first one found.
    bool any_below(double lambda) const noexcept {
        for (double x : values())
            if (x < lambda) return true;
        return false;
    }

private:
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    /// Keeps the entries in [lo, hi) at the front, in order. Writes never
    /// pass reads, so the loop needs no swaps or branches.
    void compact(double lo, double hi) noexcept {
        std::size_t k = 0;
        for (std::size_t i = 0; i < end_; ++i) {
            const double x = data_[i];
            data_[k] = x;
            k += static_cast<std::size_t>((x >= lo) & (x < hi));
        }
        end_ = k;
    }

    std::vector<double> data_;
    std::size_t end_ = 0;  // the first end_ slots hold the entries
    double lo_ = 0.0;      // thresholds of the last split
    double hi_ = 0.0;
};

inline BreakpointStats absorb(const BreakpointStats& prev, const ActiveSet::Split& sp, double lambda) noexcept {
    return {lambda, prev.count + sp.above, prev.sum + sp.sum, prev.sumsq + sp.sumsq};
}

/// Moves the anchor of `prev` down to lambda (< prev.anchor) by absorbing the
/// active entries in [lambda, prev.anchor). On return `active` holds only the
/// entries below lambda. Cost is two passes over the active entries.
inline BreakpointStats update_stats(const BreakpointStats& prev, ActiveSet& active, double lambda) noexcept {
    const auto sp = active.split(lambda);
    active.keep_below();
    return absorb(prev, sp, lambda);
}

/// Distinct values of v in decreasing order, the number of entries >= each
/// of them, and the first index (0-based) whose count reaches t^2.
struct Breakpoints {
    std::vector<double> values;
    std::vector<std::size_t> counts;
    std::size_t jt = 0;  // == values.size() when no count reaches t^2

    std::size_t size() const noexcept { return values.size(); }
};

inline Breakpoints compute_breakpoints(std::span<const double> v, double t) {
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    Breakpoints bp;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (bp.values.empty() || sorted[i] < bp.values.back()) {
            bp.values.push_back(sorted[i]);
            bp.counts.push_back(0);
        }
        bp.counts.back() = i + 1;
    }
    const double t2 = t * t;
    bp.jt = bp.values.size();
    for (std::size_t j = 0; j < bp.counts.size(); ++j) {
        if (compare_count(bp.counts[j], t2) >= 0) {
            bp.jt = j;
            break;
        }
    }
    return bp;
}

/// Number of entries equal to the maximum (I_1) and the maximum itself.
inline std::pair<std::size_t, double> count_max(std::span<const double> v) noexcept {
    double vmax = -std::numeric_limits<double>::infinity();
    std::size_t n = 0;
    for (double x : v) {
        if (x > vmax) {
            vmax = x;
            n = 1;
        } else if (x == vmax) {
            ++n;
        }
    }
    return {n, vmax};
}

}  // namespace sparseproj
