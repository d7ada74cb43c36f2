#pragma once

// Euclidean projections onto l1/l2 ball and sphere intersections.
//
// The nonnegative problems are solved by case analysis on (v, t). Every
// nontrivial case reduces to a root of phi. Signed problems are reduced to
// nonnegative ones on |v|, since an optimal x never disagrees in sign with v.

#include <sparseproj/auxiliary.hpp>
#include <sparseproj/error.hpp>
#include <sparseproj/problem.hpp>
#include <sparseproj/rootfind.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace sparseproj {

enum class CaseLabel {
    // l1 ball with l2 ball
    C_o,    // v^+ already feasible
    C_I,    // only the l2 constraint binds
    C_II,   // only the l1 constraint binds
    C_III,  // both bind, lambda* is a root of phi
    // l1 sphere with l2 sphere
    SS_NonUnique,  // I_1 > t^2
    SS_Uniform,    // I_1 == t^2
    SS_Shrink,     // I_1 < t^2
    // l1 ball with l2 sphere
    BS_Shrink,       // v_max > 0, I_1 <= t^2, ||v^+||_1 > t ||v^+||_2
    BS_Normalize,    // v_max > 0, I_1 <= t^2, ||v^+||_1 <= t ||v^+||_2
    BS_NonUnique,    // v_max > 0, I_1 > t^2
    BS_ZeroMax,      // v_max == 0
    BS_NegativeMax,  // v_max < 0
};

constexpr std::string_view to_string(CaseLabel c) noexcept {
    switch (c) {
        case CaseLabel::C_o: return "C_o";
        case CaseLabel::C_I: return "C_I";
        case CaseLabel::C_II: return "C_II";
        case CaseLabel::C_III: return "C_III";
        case CaseLabel::SS_NonUnique: return "S1S2_i";
        case CaseLabel::SS_Uniform: return "S1S2_ii";
        case CaseLabel::SS_Shrink: return "S1S2_iii";
        case CaseLabel::BS_Shrink: return "B1S2_i";
        case CaseLabel::BS_Normalize: return "B1S2_ii";
        case CaseLabel::BS_NonUnique: return "B1S2_iii";
        case CaseLabel::BS_ZeroMax: return "B1S2_iv";
        case CaseLabel::BS_NegativeMax: return "B1S2_v";
    }
    return "?";
}

struct Solution {
    std::vector<double> x;
    double lambda_star = 0.0;
    double mu_star = 0.0;
    CaseLabel case_label = CaseLabel::C_o;
    bool unique = true;
    std::size_t iterations = 0;
    /// Present when the case required solving phi(lambda) = 0.
    std::optional<RootResult> root;
};

struct ProjectOptions {
    Method method = Method::QASB;
    SolveOptions solve;
};

inline double objective(std::span<const double> x, std::span<const double> v) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - v[i];
        acc += d * d;
    }
    return 0.5 * acc;
}

/// Partial Lagrangian dual g(lambda, mu) over the nonnegative orthant.
/// Returns -inf where the inner infimum is unbounded.
inline double dual_value(std::span<const double> v, double t, double lambda, double mu) noexcept {
    constexpr double ninf = -std::numeric_limits<double>::infinity();
    double sq = 0.0;
    double shrunk = 0.0;
    double vmax = ninf;
    for (double x : v) {
        sq += x * x;
        const double d = std::max(x - lambda, 0.0);
        shrunk += d * d;
        vmax = std::max(vmax, x);
    }
    if (mu < -1.0) return ninf;
    if (mu == -1.0) return lambda >= vmax ? 0.5 * sq - lambda * t + 0.5 : ninf;
    return 0.5 * sq - lambda * t - 0.5 * mu - shrunk / (2.0 * (1.0 + mu));
}

/// A nonnegative point with m support slots, sum t and sum of squares 1:
/// ceil(t^2) - 1 slots equal to a, one slot equal to b >= a placed first,
/// and the remaining slots zero.
inline std::vector<double> canonical_sphere_point(std::size_t m, double t) {
    if (!(t > 1.0)) raise(ErrorCode::InvalidRadius, "canonical_sphere_point: requires t > 1");
    const double t2 = t * t;
    if (compare_count(m, t2) < 0) raise(ErrorCode::Infeasible, "canonical_sphere_point: support smaller than t^2");
    const std::size_t slots = ceil_count(t2);
    const double q = static_cast<double>(slots - 1);
    const double a = (t * q - std::sqrt(std::max(0.0, q * (static_cast<double>(slots) - t2)))) / (q * (q + 1.0));
    std::vector<double> out(m, 0.0);
    out[0] = t - q * a;
    for (std::size_t i = 1; i < slots; ++i) out[i] = a;
    return out;
}

namespace detail {

inline void require_sphere_radius(std::size_t n, double t) {
    if (n == 0) raise(ErrorCode::DegenerateInput, "empty input vector");
    if (!(t > 1.0) || compare_count(n, t * t) <= 0 || !std::isfinite(t))
        raise(ErrorCode::InvalidRadius, "infeasible radius: t must lie in (1, sqrt(n))");
}

inline std::vector<double> positive_part(std::span<const double> v) {
    std::vector<double> out(v.begin(), v.end());
    for (double& x : out) x = std::max(x, 0.0);
    return out;
}

struct Norms {
    double l1 = 0.0;
    double l2 = 0.0;
};

inline Norms norms(std::span<const double> v) noexcept {
    Norms out;
    double sq = 0.0;
    for (double x : v) {
        out.l1 += std::abs(x);
        sq += x * x;
    }
    out.l2 = std::sqrt(sq);
    return out;
}

/// x = (v - lambda)^+ / ||(v - lambda)^+||_2; returns the norm.
inline double shrink_normalized(std::span<const double> v, double lambda, std::vector<double>& x) {
    x.assign(v.size(), 0.0);
    double sq = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        x[i] = std::max(v[i] - lambda, 0.0);
        sq += x[i] * x[i];
    }
    const double nrm = std::sqrt(sq);
    for (double& xi : x) xi /= nrm;
    return nrm;
}

inline double second_max(std::span<const double> v, double vmax) noexcept {
    double out = -std::numeric_limits<double>::infinity();
    for (double x : v)
        if (x < vmax) out = std::max(out, x);
    return out;
}

inline std::vector<std::size_t> argmax_indices(std::span<const double> v, double vmax) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] == vmax) idx.push_back(i);
    return idx;
}

/// Canonical point of { sum_{I_1} x = t, sum_{I_1} x^2 = 1, x >= 0, x = 0 off I_1 }.
inline std::vector<double> canonical_on_max(std::span<const double> v, double vmax, double t) {
    const auto support = argmax_indices(v, vmax);
    const auto values = canonical_sphere_point(support.size(), t);
    std::vector<double> x(v.size(), 0.0);
    for (std::size_t i = 0; i < support.size(); ++i) x[support[i]] = values[i];
    return x;
}

/// x_i = 1/sqrt(I_1) on the maximal entries, lambda* at the left end of the
/// zero plateau of phi.
inline Solution uniform_on_max(std::span<const double> v, std::size_t top, double vmax, CaseLabel label) {
    Solution sol;
    sol.case_label = label;
    sol.unique = true;
    sol.x.assign(v.size(), 0.0);
    const double val = std::sqrt(1.0 / static_cast<double>(top));
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] == vmax) sol.x[i] = val;
    sol.lambda_star = second_max(v, vmax);
    sol.mu_star = std::sqrt(static_cast<double>(top)) * (vmax - sol.lambda_star) - 1.0;
    return sol;
}

inline Solution shrink_from_root(std::span<const double> v, std::span<const double> solve_on, double t,
                                 const ProjectOptions& opt, CaseLabel label) {
    Solution sol;
    sol.case_label = label;
    sol.unique = true;
    auto rr = solve_phi_root(solve_on, t, opt.method, opt.solve);
    sol.lambda_star = polish_root(solve_on, t, rr.root);
    sol.mu_star = shrink_normalized(v, sol.lambda_star, sol.x) - 1.0;
    sol.iterations = rr.iterations;
    sol.root = std::move(rr);
    return sol;
}

}  // namespace detail

/// Projection onto { x >= 0, ||x||_1 <= t, ||x||_2 <= 1 }. Any t > 0 is
/// accepted: for t <= 1 the l2 constraint never binds and for t >= sqrt(n)
/// the l1 constraint never binds, and the four-way dispatch covers both.
inline Solution project_b1b2_nonneg(std::span<const double> v, double t, const ProjectOptions& opt = {}) {
    if (v.empty()) raise(ErrorCode::DegenerateInput, "empty input vector");
    if (!(t > 0.0) || !std::isfinite(t)) raise(ErrorCode::InvalidRadius, "infeasible radius: t must be positive");
    const auto vp = detail::positive_part(v);
    const auto nv = detail::norms(vp);

    Solution sol;
    if (nv.l1 <= t && nv.l2 <= 1.0) {
        sol.case_label = CaseLabel::C_o;
        sol.x = vp;
        return sol;
    }
    if (nv.l2 > 1.0 && nv.l1 <= t * nv.l2) {
        sol.case_label = CaseLabel::C_I;
        sol.x = vp;
        for (double& x : sol.x) x /= nv.l2;
        sol.mu_star = nv.l2 - 1.0;
        return sol;
    }
    const double hat = psi_root(vp, t);
    std::vector<double> shrunk(vp.size());
    double sq = 0.0;
    for (std::size_t i = 0; i < vp.size(); ++i) {
        shrunk[i] = std::max(vp[i] - hat, 0.0);
        sq += shrunk[i] * shrunk[i];
    }
    if (std::sqrt(sq) <= 1.0) {
        sol.case_label = CaseLabel::C_II;
        sol.x = std::move(shrunk);
        sol.lambda_star = hat;
        return sol;
    }
    return detail::shrink_from_root(vp, vp, t, opt, CaseLabel::C_III);
}

/// Projection onto { x >= 0, ||x||_1 == t, ||x||_2 == 1 }, 1 < t < sqrt(n).
inline Solution project_s1s2_nonneg(std::span<const double> v, double t, const ProjectOptions& opt = {}) {
    detail::require_sphere_radius(v.size(), t);
    const auto [top, vmax] = count_max(v);
    const int cmp = compare_count(top, t * t);
    if (cmp > 0) {
        Solution sol;
        sol.case_label = CaseLabel::SS_NonUnique;
        sol.unique = false;
        sol.x = detail::canonical_on_max(v, vmax, t);
        sol.lambda_star = vmax;
        sol.mu_star = -1.0;
        return sol;
    }
    if (cmp == 0) return detail::uniform_on_max(v, top, vmax, CaseLabel::SS_Uniform);
    // The root may be negative here, so phi is taken over v itself.
    return detail::shrink_from_root(v, v, t, opt, CaseLabel::SS_Shrink);
}

/// Projection onto { x >= 0, ||x||_1 <= t, ||x||_2 == 1 }, 1 < t < sqrt(n).
inline Solution project_b1s2_nonneg(std::span<const double> v, double t, const ProjectOptions& opt = {}) {
    detail::require_sphere_radius(v.size(), t);
    const auto [top, vmax] = count_max(v);
    Solution sol;
    if (vmax > 0.0) {
        const int cmp = compare_count(top, t * t);
        if (cmp > 0) {
            sol.case_label = CaseLabel::BS_NonUnique;
            sol.unique = false;
            sol.x = detail::canonical_on_max(v, vmax, t);
            sol.lambda_star = vmax;
            sol.mu_star = -1.0;
            return sol;
        }
        const auto vp = detail::positive_part(v);
        const auto nv = detail::norms(vp);
        if (nv.l1 > t * nv.l2) {
            if (cmp == 0) return detail::uniform_on_max(v, top, vmax, CaseLabel::BS_Shrink);
            return detail::shrink_from_root(vp, vp, t, opt, CaseLabel::BS_Shrink);
        }
        sol.case_label = CaseLabel::BS_Normalize;
        sol.x = vp;
        for (double& x : sol.x) x /= nv.l2;
        sol.mu_star = nv.l2 - 1.0;
        return sol;
    }
    // No positive entry: a single spike on the lowest index attaining v_max.
    sol.case_label = vmax == 0.0 ? CaseLabel::BS_ZeroMax : CaseLabel::BS_NegativeMax;
    sol.unique = false;
    sol.x.assign(v.size(), 0.0);
    sol.x[detail::argmax_indices(v, vmax).front()] = 1.0;
    sol.lambda_star = 0.0;
    sol.mu_star = -1.0;
    return sol;
}

inline Solution project_nonneg(std::span<const double> v, double t, Intersection shape, const ProjectOptions& opt = {}) {
    switch (shape) {
        case Intersection::BallBall: return project_b1b2_nonneg(v, t, opt);
        case Intersection::BallSphere: return project_b1s2_nonneg(v, t, opt);
        case Intersection::SphereSphere: return project_s1s2_nonneg(v, t, opt);
    }
    return project_b1b2_nonneg(v, t, opt);
}

/// Solves the nonnegative problem on |v| and restores the signs of v
/// (sign(0) taken as +1).
inline Solution project_signed(std::span<const double> v, double t, Intersection shape, const ProjectOptions& opt = {}) {
    std::vector<double> mag(v.begin(), v.end());
    for (double& x : mag) x = std::abs(x);
    auto sol = project_nonneg(mag, t, shape, opt);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] < 0.0) sol.x[i] = -sol.x[i];
    return sol;
}

inline Solution project(std::span<const double> v, double t, const ProblemKind& kind, const ProjectOptions& opt = {}) {
    if (kind.nonnegative()) return project_nonneg(v, t, kind.shape, opt);
    return project_signed(v, t, kind.shape, opt);
}

/// Dual value at the multipliers of `sol`. Signed problems are certified on
/// |v|, the vector their nonnegative counterpart was solved on.
inline double dual_certificate(std::span<const double> v, double t, const ProblemKind& kind, const Solution& sol) {
    if (kind.nonnegative()) return dual_value(v, t, sol.lambda_star, sol.mu_star);
    std::vector<double> mag(v.begin(), v.end());
    for (double& x : mag) x = std::abs(x);
    return dual_value(mag, t, sol.lambda_star, sol.mu_star);
}

}  // namespace sparseproj
