#pragma once

// Brute-force reference solvers for small instances.
//
// oracle_project enumerates every support (and, for signed problems, every
// sign pattern on it), writes down the closed-form stationary points of each
// constraint-activity pattern, and keeps the best feasible one. It shares no
// code with the fast solvers and is only meant for n <= 12.

#include <sparseproj/error.hpp>
#include <sparseproj/problem.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <charconv>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace sparseproj {

struct OracleReport {
    std::vector<double> best_x;
    double best_objective = std::numeric_limits<double>::infinity();
    std::size_t candidates_examined = 0;
};

inline constexpr std::size_t kOracleMaxDim = 12;
inline constexpr double kOracleFeasTol = 1e-10;

namespace detail {

class OracleSearch {
public:
    OracleSearch(std::span<const double> v, double t, Intersection shape) : v_(v), t_(t), shape_(shape) {
        report_.best_x.assign(v.size(), 0.0);
    }

    /// Scores y (on `support`, with signs `sign`) if it is feasible.
    void offer(const std::vector<std::size_t>& support, const std::vector<double>& sign, const std::vector<double>& y) {
        ++report_.candidates_examined;
        const double tol = kOracleFeasTol * std::max(1.0, t_);
        double sum = 0.0;
        double sq = 0.0;
        for (double yi : y) {
            if (!(yi >= -kOracleFeasTol)) return;
            sum += yi;
            sq += yi * yi;
        }
        const double nrm = std::sqrt(sq);
        const bool l1_ok = shape_ == Intersection::SphereSphere ? std::abs(sum - t_) <= tol : sum <= t_ + tol;
        const bool l2_ok = shape_ == Intersection::BallBall ? nrm <= 1.0 + kOracleFeasTol
                                                            : std::abs(nrm - 1.0) <= kOracleFeasTol;
        if (!l1_ok || !l2_ok) return;

        std::vector<double> x(v_.size(), 0.0);
        for (std::size_t k = 0; k < support.size(); ++k) x[support[k]] = sign[k] * std::max(y[k], 0.0);
        double obj = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) obj += (x[i] - v_[i]) * (x[i] - v_[i]);
        obj *= 0.5;
        // Earlier candidates win ties.
        if (obj < report_.best_objective - 1e-12) {
            report_.best_objective = obj;
            report_.best_x = std::move(x);
        }
    }

    /// All stationary candidates on one support, with u = sign .* v_S.
    void scan(const std::vector<std::size_t>& support, const std::vector<double>& sign) {
        const std::size_t m = support.size();
        const double md = static_cast<double>(m);
        std::vector<double> u(m);
        double s = 0.0;
        double w = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            u[k] = sign[k] * v_[support[k]];
            s += u[k];
            w += u[k] * u[k];
        }
        const double unorm = std::sqrt(w);
        std::vector<double> y(m);

        // No constraint active.
        if (shape_ == Intersection::BallBall) offer(support, sign, u);

        // Only the l1 constraint active.
        if (shape_ == Intersection::BallBall) {
            const double lam = (s - t_) / md;
            for (std::size_t k = 0; k < m; ++k) y[k] = u[k] - lam;
            offer(support, sign, y);
        }

        // Only the l2 constraint active, in either direction.
        if (shape_ != Intersection::SphereSphere && unorm > 0.0) {
            for (double dir : {1.0, -1.0}) {
                for (std::size_t k = 0; k < m; ++k) y[k] = dir * u[k] / unorm;
                offer(support, sign, y);
            }
        }

        // Both active: (s - m lam)^2 = t^2 ||u - lam||^2, y = t (u - lam) / (s - m lam).
        const double t2 = t_ * t_;
        const double qa = md * (md - t2);
        const double qb = -2.0 * s * (md - t2);
        const double qc = s * s - t2 * w;
        if (qa != 0.0) {
            const double disc = qb * qb - 4.0 * qa * qc;
            if (disc >= 0.0) {
                const double sq = std::sqrt(disc);
                for (double lam : {(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)}) {
                    const double denom = s - md * lam;
                    if (denom == 0.0) continue;
                    for (std::size_t k = 0; k < m; ++k) y[k] = t_ * (u[k] - lam) / denom;
                    offer(support, sign, y);
                }
            }
        }

        // Uniform point on the support.
        for (std::size_t k = 0; k < m; ++k) y[k] = 1.0 / std::sqrt(md);
        offer(support, sign, y);

        // Stationarity degenerates (1 + mu = 0) when u is constant on the
        // support; every point with sum t and unit norm is then equally good,
        // and t/m * 1 + beta (e_1 - 1/m * 1) is one of them.
        const bool constant = std::all_of(u.begin(), u.end(), [&](double x) { return x == u[0]; });
        if (constant && m > 1 && md >= t2) {
            const double alpha = t_ / md;
            const double beta = std::sqrt(std::max(0.0, (1.0 - t2 / md) / (1.0 - 1.0 / md)));
            for (std::size_t k = 0; k < m; ++k) y[k] = alpha - beta / md;
            y[0] += beta;
            offer(support, sign, y);
        }
    }

    OracleReport take() { return std::move(report_); }

private:
    std::span<const double> v_;
    double t_;
    Intersection shape_;
    OracleReport report_;
};

}  // namespace detail

inline OracleReport oracle_project(std::span<const double> v, double t, const ProblemKind& kind) {
    const std::size_t n = v.size();
    if (n > kOracleMaxDim) raise(ErrorCode::TooLarge, "oracle_project: n > 12");
    if (n == 0) raise(ErrorCode::DegenerateInput, "oracle_project: empty input vector");

    detail::OracleSearch search(v, t, kind.shape);
    // x = 0 is a candidate whose support is empty.
    search.offer({}, {}, {});

    // Each entry is off (0), positive (1) or, for signed problems, negative (2).
    const std::size_t base = kind.nonnegative() ? 2 : 3;
    std::vector<std::size_t> digit(n, 0);
    std::vector<std::size_t> support;
    std::vector<double> sign;
    for (;;) {
        std::size_t i = 0;
        while (i < n && digit[i] == base - 1) digit[i++] = 0;
        if (i == n) break;
        ++digit[i];

        support.clear();
        sign.clear();
        for (std::size_t k = 0; k < n; ++k) {
            if (digit[k] == 0) continue;
            support.push_back(k);
            sign.push_back(digit[k] == 1 ? 1.0 : -1.0);
        }
        search.scan(support, sign);
    }
    auto report = search.take();
    if (!std::isfinite(report.best_objective)) raise(ErrorCode::Infeasible, "oracle_project: no feasible candidate");
    return report;
}

struct OraclePhiRoot {
    double root = 0.0;
    /// True when phi vanishes on the whole of [lambda_2, v_max); root is then lambda_2.
    bool plateau = false;
};

/// Root of phi found by evaluating it from its definition at every
/// breakpoint and solving the quadratic of the piece where the sign changes.
inline OraclePhiRoot oracle_phi_root(std::span<const double> v, double t) {
    if (v.empty()) raise(ErrorCode::DegenerateInput, "oracle_phi_root: empty input vector");
    std::vector<double> knots(v.begin(), v.end());
    std::sort(knots.begin(), knots.end(), std::greater<>());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    const double t2 = t * t;

    auto phi = [&](double lam) {
        double a = 0.0;
        double b = 0.0;
        for (double x : v) {
            const double d = std::max(x - lam, 0.0);
            a += d;
            b += d * d;
        }
        return a * a - t2 * b;
    };
    auto stats = [&](double lam, double& I, double& s, double& w) {
        I = s = w = 0.0;
        for (double x : v) {
            if (x >= lam) {
                I += 1.0;
                s += x;
                w += x * x;
            }
        }
    };

    double I1 = 0.0, s1 = 0.0, w1 = 0.0;
    stats(knots[0], I1, s1, w1);
    const double guard = 1e-12 * std::max(1.0, t2);
    if (std::abs(I1 - t2) <= guard) {
        if (knots.size() < 2) raise(ErrorCode::DegenerateInput, "oracle_phi_root: constant vector");
        return {knots[1], true};
    }
    if (I1 > t2) raise(ErrorCode::NoRoot, "oracle_phi_root: I_1 >= t^2");

    // The root lies between knots[j] and knots[j-1], where phi first becomes
    // nonnegative, or below the last knot. On that interval the entries above
    // lambda are exactly those >= knots[j-1].
    std::size_t j = 1;
    while (j < knots.size()) {
        const double f = phi(knots[j]);
        if (f == 0.0) return {knots[j], false};
        if (f > 0.0) break;
        ++j;
    }
    const double hi = knots[j - 1];
    const double anchor = j < knots.size() ? knots[j] : -std::numeric_limits<double>::infinity();
    double I = 0.0, s = 0.0, w = 0.0;
    stats(hi, I, s, w);

    const double a = I * (I - t2);
    const double b = -2.0 * s * (I - t2);
    const double c = s * s - t2 * w;
    if (a == 0.0) raise(ErrorCode::Degenerate, "oracle_phi_root: degenerate piece");
    const double disc = std::max(0.0, b * b - 4.0 * a * c);
    const double r1 = (-b - std::sqrt(disc)) / (2.0 * a);
    const double r2 = (-b + std::sqrt(disc)) / (2.0 * a);
    const double lo_root = std::min(r1, r2);
    const double hi_root = std::max(r1, r2);
    // Prefer the smaller root when it falls on the piece.
    const double slack = 1e-9 * std::max(1.0, std::abs(hi));
    if (lo_root >= anchor - slack && lo_root <= hi + slack) return {lo_root, false};
    return {hi_root, false};
}

/// One regression line: `kind t v... -> objective x...`, numbers in
/// shortest round-trip form.
inline std::string oracle_fixture_line(const ProblemKind& kind, double t, std::span<const double> v,
                                       const OracleReport& report) {
    char buf[32];
    std::string out = to_string(kind);
    auto put = [&](double x) {
        const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
        (void)ec;
        out += ' ';
        out.append(buf, end);
    };
    put(t);
    for (double x : v) put(x);
    out += " ->";
    put(report.best_objective);
    for (double x : report.best_x) put(x);
    return out;
}

}  // namespace sparseproj
