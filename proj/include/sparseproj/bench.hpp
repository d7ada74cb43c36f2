#pragma once

// Benchmark harness: reproducible instance generation, instance filtering,
// timed root solves and CSV output.
//
// Every trial owns its generator, seeded with seed ^ trial, so trials can
// run in any order or in parallel and still see the same vectors.

#include <sparseproj/auxiliary.hpp>
#include <sparseproj/error.hpp>
#include <sparseproj/problem.hpp>
#include <sparseproj/rootfind.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace sparseproj {

/// mt19937_64 with explicitly defined uniform, normal and index draws, so
/// streams do not depend on the standard library's distribution classes.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Standard normal by the Box-Muller transform; values come in pairs.
    double normal() noexcept {
        if (spare_) {
            const double z = *spare_;
            spare_.reset();
            return z;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * std::numbers::pi * u2;
        spare_ = rad * std::sin(ang);
        return rad * std::cos(ang);
    }

    /// Uniform integer in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) noexcept {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % bound;
    }

    template <class T>
    void shuffle(std::vector<T>& xs) noexcept {
        for (std::size_t i = xs.size(); i > 1; --i) std::swap(xs[i - 1], xs[below(i)]);
    }

private:
    std::mt19937_64 eng_;
    std::optional<double> spare_;
};

enum class DataType { Type1 = 1, Type2 = 2, Type3 = 3 };

inline std::optional<DataType> parse_data_type(std::string_view s) {
    if (s == "1") return DataType::Type1;
    if (s == "2") return DataType::Type2;
    if (s == "3") return DataType::Type3;
    return std::nullopt;
}

/// i.i.d. N(0, 1).
inline std::vector<double> gen_type1(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.normal();
    return v;
}

/// floor(7n/8) entries N(0, 0.2^2), the rest N(0.9, 0.2^2), randomly placed.
inline std::vector<double> gen_type2(std::size_t n, Rng& rng) {
    const std::size_t low = 7 * n / 8;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = (i < low ? 0.0 : 0.9) + 0.2 * rng.normal();
    rng.shuffle(v);
    return v;
}

/// Four near-equal blocks with means 0.1, 0.4, 0.7, 1.0 and sd 0.2, randomly
/// placed. The n mod 4 leftover entries go to the earliest blocks.
inline std::vector<double> gen_type3(std::size_t n, Rng& rng) {
    constexpr double means[4] = {0.1, 0.4, 0.7, 1.0};
    std::vector<double> v;
    v.reserve(n);
    for (std::size_t b = 0; b < 4; ++b) {
        const std::size_t size = n / 4 + (b < n % 4 ? 1 : 0);
        for (std::size_t i = 0; i < size; ++i) v.push_back(means[b] + 0.2 * rng.normal());
    }
    rng.shuffle(v);
    return v;
}

inline std::vector<double> generate(DataType type, std::size_t n, Rng& rng) {
    switch (type) {
        case DataType::Type1: return gen_type1(n, rng);
        case DataType::Type2: return gen_type2(n, rng);
        case DataType::Type3: return gen_type3(n, rng);
    }
    return gen_type1(n, rng);
}

inline std::vector<double> gen_type1(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    return gen_type1(n, rng);
}
inline std::vector<double> gen_type2(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    return gen_type2(n, rng);
}
inline std::vector<double> gen_type3(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    return gen_type3(n, rng);
}

/// t = sqrt(n) - sigma (sqrt(n) - 1).
inline double radius_from_sigma(std::size_t n, double sigma) noexcept {
    const double rn = std::sqrt(static_cast<double>(n));
    return rn - sigma * (rn - 1.0);
}

struct BenchConfig {
    std::size_t n = 1000;
    DataType data_type = DataType::Type1;
    double sigma = 0.9;
    std::optional<double> t;  // overrides sigma when set
    std::size_t repeats = 100;
    std::vector<Method> methods{Method::QASB};
    ProblemKind problem{};
    std::uint64_t seed = 0;
    double tol = 1e-9;
    std::size_t jobs = 1;

    double radius() const noexcept { return t ? *t : radius_from_sigma(n, sigma); }
};

struct BenchRow {
    Method method = Method::QASB;
    ProblemKind problem{};
    DataType data_type = DataType::Type1;
    std::size_t n = 0;
    double t = 0.0;
    std::uint64_t seed = 0;
    std::size_t trial = 0;
    std::int64_t time_ns = 0;
    std::size_t iterations = 0;
    std::size_t nnz = 0;
    double lambda_star = 0.0;
    /// |phi(lambda*)| divided by max(1, ||w||_1^2), the scale of phi on the instance.
    double phi_residual = 0.0;
};

/// The vector phi is solved on for one trial, after the instance filter.
struct BenchInstance {
    std::vector<double> w;
    double t = 0.0;
    std::size_t attempts = 1;
};

inline constexpr std::size_t kMaxGenerationAttempts = 1000;

namespace detail {

/// The C_III case predicates on a nonnegative vector.
inline bool in_case_three(std::span<const double> w, double t) {
    double l1 = 0.0;
    double sq = 0.0;
    for (double x : w) {
        l1 += x;
        sq += x * x;
    }
    if (!(l1 > t) || !(l1 > t * std::sqrt(sq))) return false;
    const double hat = psi_root(w, t);
    double rest = 0.0;
    for (double x : w) {
        const double d = std::max(x - hat, 0.0);
        rest += d * d;
    }
    return std::sqrt(rest) > 1.0;
}

inline bool sphere_filter(std::span<const double> w, double t) {
    double l1 = 0.0;
    double sq = 0.0;
    for (double x : w) {
        l1 += std::max(x, 0.0);
        sq += std::max(x, 0.0) * std::max(x, 0.0);
    }
    const auto [top, vmax] = count_max(w);
    (void)vmax;
    return l1 > t * std::sqrt(sq) && compare_count(top, t * t) < 0;
}

inline void validate(const BenchConfig& cfg) {
    if (cfg.repeats == 0) raise(ErrorCode::PreconditionFailed, "bench: repeats must be at least 1");
    if (cfg.n == 0) raise(ErrorCode::PreconditionFailed, "bench: n must be at least 1");
    if (cfg.methods.empty()) raise(ErrorCode::PreconditionFailed, "bench: no methods requested");
    const double t = cfg.radius();
    const double rn = std::sqrt(static_cast<double>(cfg.n));
    if (!(t > 1.0) || !(t < rn)) raise(ErrorCode::InvalidRadius, "infeasible radius: t must lie in (1, sqrt(n))");
}

}  // namespace detail

/// Generates the instance of one trial. Signed problems are solved on |v|;
/// nonnegative ball problems on v^+, and the nonnegative sphere-sphere
/// problem on v itself. Candidates failing the filter are redrawn from the
/// same stream.
inline BenchInstance make_instance(const BenchConfig& cfg, std::size_t trial) {
    const double t = cfg.radius();
    Rng rng(cfg.seed ^ static_cast<std::uint64_t>(trial));
    BenchInstance inst;
    inst.t = t;
    for (std::size_t attempt = 1; attempt <= kMaxGenerationAttempts; ++attempt) {
        auto v = generate(cfg.data_type, cfg.n, rng);
        if (!cfg.problem.nonnegative()) {
            for (double& x : v) x = std::abs(x);
        } else if (cfg.problem.shape != Intersection::SphereSphere) {
            for (double& x : v) x = std::max(x, 0.0);
        }
        const bool ok = cfg.problem.shape == Intersection::BallBall ? detail::in_case_three(v, t)
                                                                     : detail::sphere_filter(v, t);
        if (ok) {
            inst.w = std::move(v);
            inst.attempts = attempt;
            return inst;
        }
    }
    raise(ErrorCode::GenerationExhausted, "bench: 1000 consecutive candidates failed the instance filter");
}

/// Builds the bracket (when the method uses one) and solves. The bracket
/// (l-tilde, l-hat) of initial_bracket is used whenever its hypotheses hold.
inline RootResult solve_instance(std::span<const double> w, double t, Method m, const SolveOptions& opt) {
    return solve_phi_root(w, t, m, opt);
}

inline std::vector<BenchRow> run_trial(const BenchConfig& cfg, std::size_t trial) {
    const auto inst = make_instance(cfg, trial);
    const SolveOptions opt{cfg.tol, SolveOptions{}.max_iterations};
    double scale = 0.0;
    for (double x : inst.w) scale += std::max(x, 0.0);
    scale = std::max(1.0, scale * scale);

    std::vector<BenchRow> rows;
    for (Method m : cfg.methods) {
        const auto start = std::chrono::steady_clock::now();
        const auto rr = solve_instance(inst.w, inst.t, m, opt);
        const auto stop = std::chrono::steady_clock::now();

        BenchRow row;
        row.method = m;
        row.problem = cfg.problem;
        row.data_type = cfg.data_type;
        row.n = cfg.n;
        row.t = inst.t;
        row.seed = cfg.seed;
        row.trial = trial;
        row.time_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
        row.iterations = rr.iterations;
        row.lambda_star = rr.root;
        for (double x : inst.w)
            if (x > rr.root) ++row.nnz;
        row.phi_residual = std::abs(eval_phi(inst.w, rr.root, inst.t)) / scale;
        rows.push_back(row);
    }
    return rows;
}

/// Rows ordered by trial, then by the order of cfg.methods.
inline std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
    detail::validate(cfg);
    std::vector<std::vector<BenchRow>> per_trial(cfg.repeats);
    const std::size_t jobs = std::max<std::size_t>(1, std::min(cfg.jobs, cfg.repeats));
    if (jobs == 1) {
        for (std::size_t k = 0; k < cfg.repeats; ++k) per_trial[k] = run_trial(cfg, k);
    } else {
        std::vector<std::exception_ptr> errors(jobs);
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < jobs; ++j) {
            pool.emplace_back([&, j] {
                try {
                    for (std::size_t k = j; k < cfg.repeats; k += jobs) per_trial[k] = run_trial(cfg, k);
                } catch (...) {
                    errors[j] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    std::vector<BenchRow> rows;
    rows.reserve(cfg.repeats * cfg.methods.size());
    for (auto& tr : per_trial) rows.insert(rows.end(), tr.begin(), tr.end());
    return rows;
}

/// Solver run with the per-iteration trace kept.
inline RootResult trace_run(std::span<const double> v, double t, Method m, const SolveOptions& opt = {}) {
    return solve_phi_root(v, t, m, opt);
}

// ---- CSV ----

inline constexpr std::string_view kBenchCsvHeader =
    "method,problem,data_type,n,t,seed,trial,time_ns,iterations,nnz,lambda_star,phi_residual";

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string csv_row(const BenchRow& r) {
    std::string out;
    auto add = [&](std::string_view s) {
        if (!out.empty()) out += ',';
        out += csv_field(s);
    };
    add(to_string(r.method));
    add(to_string(r.problem));
    add(std::to_string(static_cast<int>(r.data_type)));
    add(std::to_string(r.n));
    add(format_real(r.t));
    add(std::to_string(r.seed));
    add(std::to_string(r.trial));
    add(std::to_string(r.time_ns));
    add(std::to_string(r.iterations));
    add(std::to_string(r.nnz));
    add(format_real(r.lambda_star));
    add(format_real(r.phi_residual));
    return out;
}

inline void write_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
    os << kBenchCsvHeader << '\n';
    for (const auto& r : rows) os << csv_row(r) << '\n';
}

}  // namespace sparseproj
