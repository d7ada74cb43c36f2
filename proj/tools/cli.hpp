#pragma once

// Command-line front end: project, bench and trace subcommands.
//
// Exit codes: 0 success, 2 bad arguments or unreadable input, 3 the solver
// refused the instance (radius, missing root, non-convergence).

#include <sparseproj/sparseproj.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace sparseproj::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSolver = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline ProblemKind make_kind(const std::string& problem, bool nonneg) {
    const auto shape = parse_intersection(problem);
    if (!shape) throw UsageError("unknown problem '" + problem + "' (expected b1b2, b1s2 or s1s2)");
    return {*shape, nonneg ? Restriction::Nonnegative : Restriction::Signed};
}

inline Method make_method(const std::string& name) {
    const auto m = parse_method(name);
    if (!m) throw UsageError("unknown method '" + name + "' (expected fs, bm, ssnsb or qasb)");
    return *m;
}

inline std::vector<Method> make_methods(const std::string& list) {
    std::vector<Method> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(make_method(item));
    }
    if (out.empty()) throw UsageError("empty method list");
    return out;
}

inline VectorFormat make_format(const std::string& name) {
    const auto f = parse_format(name);
    if (!f) throw UsageError("unknown format '" + name + "' (expected text or f64le)");
    return *f;
}

inline std::vector<double> load_vector(const std::string& path, VectorFormat fmt, std::istream& stdin_stream) {
    if (path.empty() || path == "-") return read_vector(stdin_stream, fmt);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open input file '" + path + "'");
    return read_vector(in, fmt);
}

inline double resolve_radius(std::size_t n, const std::optional<double>& t, const std::optional<double>& sigma) {
    if (t && sigma) throw UsageError("--t and --sigma are mutually exclusive");
    if (t) return *t;
    if (sigma) return radius_from_sigma(n, *sigma);
    throw UsageError("one of --t or --sigma is required");
}

inline std::string fmt_real(double x) {
    if (std::isnan(x)) return "-";
    return format_shortest(x);
}

/// Mean and sample standard deviation.
inline std::pair<double, double> mean_sd(const std::vector<double>& xs) {
    if (xs.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    if (xs.size() > 1) var /= static_cast<double>(xs.size() - 1);
    return {mean, std::sqrt(var)};
}

inline void write_bench_summary(std::ostream& err, const BenchConfig& cfg, const std::vector<BenchRow>& rows) {
    char line[256];
    std::snprintf(line, sizeof line, "%s type=%d n=%zu t=%.6g trials=%zu\n", to_string(cfg.problem).c_str(),
                  static_cast<int>(cfg.data_type), cfg.n, cfg.radius(), cfg.repeats);
    err << line;
    std::snprintf(line, sizeof line, "%-8s %22s %26s %12s\n", "method", "iterations mean(sd)", "time_ms mean(sd)", "nnz mean");
    err << line;
    for (Method m : cfg.methods) {
        std::vector<double> iters, ms, nnz;
        for (const auto& r : rows) {
            if (r.method != m) continue;
            iters.push_back(static_cast<double>(r.iterations));
            ms.push_back(static_cast<double>(r.time_ns) * 1e-6);
            nnz.push_back(static_cast<double>(r.nnz));
        }
        const auto [im, is] = mean_sd(iters);
        const auto [tm, ts] = mean_sd(ms);
        const auto [nm, ns] = mean_sd(nnz);
        (void)ns;
        char a[64], b[64];
        std::snprintf(a, sizeof a, "%.2f(%.2f)", im, is);
        std::snprintf(b, sizeof b, "%.4f(%.4f)", tm, ts);
        std::snprintf(line, sizeof line, "%-8s %22s %26s %12.1f\n", std::string(to_string(m)).c_str(), a, b, nm);
        err << line;
    }
}

}  // namespace detail

/// Runs one invocation. `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                   std::istream& in = std::cin) {
    CLI::App app{"Euclidean projections onto l1/l2 ball and sphere intersections", "sparseproj"};
    app.require_subcommand(1);

    // project
    auto* project = app.add_subcommand("project", "Project one vector");
    std::string p_problem = "b1b2";
    bool p_nonneg = false;
    std::string p_input;
    std::string p_format = "text";
    std::optional<double> p_t;
    std::optional<double> p_sigma;
    std::string p_method = "qasb";
    double p_tol = 1e-9;
    std::string p_output;
    project->add_option("--problem", p_problem, "b1b2, b1s2 or s1s2")->required();
    project->add_flag("--nonneg", p_nonneg, "Restrict to the nonnegative orthant");
    project->add_option("--input", p_input, "Input vector file (default stdin)");
    project->add_option("--format", p_format, "text or f64le");
    auto* p_t_opt = project->add_option("--t", p_t, "l1 radius");
    project->add_option("--sigma", p_sigma, "Sparseness level, t = sqrt(n) - sigma (sqrt(n) - 1)")->excludes(p_t_opt);
    project->add_option("--method", p_method, "fs, bm, ssnsb or qasb");
    project->add_option("--tol", p_tol, "Solver tolerance");
    project->add_option("--output", p_output, "Output file (default stdout)");

    // bench
    auto* bench = app.add_subcommand("bench", "Run the benchmark protocol and print CSV");
    std::string b_problem = "b1b2";
    bool b_nonneg = false;
    std::string b_type = "1";
    std::size_t b_n = 1000;
    std::optional<double> b_t;
    double b_sigma = 0.9;
    long long b_repeats = 100;
    std::string b_methods = "fs,bm,ssnsb,qasb";
    std::uint64_t b_seed = 0;
    double b_tol = 1e-9;
    std::size_t b_jobs = 1;
    bench->add_option("--problem", b_problem, "b1b2, b1s2 or s1s2");
    bench->add_flag("--nonneg", b_nonneg, "Restrict to the nonnegative orthant");
    bench->add_option("--type", b_type, "Data type 1, 2 or 3");
    bench->add_option("--n", b_n, "Dimension");
    auto* b_sigma_opt = bench->add_option("--sigma", b_sigma, "Sparseness level");
    bench->add_option("--t", b_t, "l1 radius")->excludes(b_sigma_opt);
    bench->add_option("--repeats", b_repeats, "Trials");
    bench->add_option("--methods", b_methods, "Comma separated methods");
    bench->add_option("--seed", b_seed, "Base seed");
    bench->add_option("--tol", b_tol, "Solver tolerance");
    bench->add_option("--jobs", b_jobs, "Worker threads");

    // trace
    auto* trace = app.add_subcommand("trace", "Print the per-iteration trace of one solve");
    std::string r_problem = "b1b2";
    bool r_nonneg = false;
    std::string r_method = "qasb";
    std::size_t r_n = 100;
    std::string r_type = "1";
    std::uint64_t r_seed = 0;
    std::optional<double> r_t;
    std::optional<double> r_sigma;
    std::string r_input;
    std::string r_format = "text";
    double r_tol = 1e-9;
    trace->add_option("--problem", r_problem, "b1b2, b1s2 or s1s2");
    trace->add_flag("--nonneg", r_nonneg, "Restrict to the nonnegative orthant");
    trace->add_option("--method", r_method, "fs, bm, ssnsb or qasb");
    trace->add_option("--n", r_n, "Dimension of the generated instance");
    trace->add_option("--type", r_type, "Data type 1, 2 or 3");
    trace->add_option("--seed", r_seed, "Seed of the generated instance");
    auto* r_t_opt = trace->add_option("--t", r_t, "l1 radius");
    trace->add_option("--sigma", r_sigma, "Sparseness level (default 0.9)")->excludes(r_t_opt);
    trace->add_option("--input", r_input, "Trace this vector instead of a generated one");
    trace->add_option("--format", r_format, "text or f64le");
    trace->add_option("--tol", r_tol, "Solver tolerance");

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("sparseproj");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*project) {
            const auto kind = detail::make_kind(p_problem, p_nonneg);
            const auto fmt = detail::make_format(p_format);
            ProjectOptions opt;
            opt.method = detail::make_method(p_method);
            opt.solve.tol = p_tol;
            const auto v = detail::load_vector(p_input, fmt, in);
            if (v.empty()) throw UsageError("input vector is empty");
            const double t = detail::resolve_radius(v.size(), p_t, p_sigma);
            const auto sol = sparseproj::project(v, t, kind, opt);
            if (p_output.empty() || p_output == "-") {
                write_vector(out, sol.x, fmt);
            } else {
                std::ofstream f(p_output, std::ios::binary);
                if (!f) throw UsageError("cannot open output file '" + p_output + "'");
                write_vector(f, sol.x, fmt);
                if (!f) throw UsageError("write failed for '" + p_output + "'");
            }
            err << "case=" << to_string(sol.case_label) << " lambda=" << format_shortest(sol.lambda_star)
                << " mu=" << format_shortest(sol.mu_star) << " iters=" << sol.iterations
                << " unique=" << (sol.unique ? "true" : "false") << '\n';
            return kExitOk;
        }
        if (*bench) {
            if (b_repeats < 1) throw UsageError("--repeats must be at least 1");
            if (b_n < 1) throw UsageError("--n must be at least 1");
            BenchConfig cfg;
            cfg.problem = detail::make_kind(b_problem, b_nonneg);
            const auto type = parse_data_type(b_type);
            if (!type) throw UsageError("unknown data type '" + b_type + "' (expected 1, 2 or 3)");
            cfg.data_type = *type;
            cfg.n = b_n;
            cfg.sigma = b_sigma;
            cfg.t = b_t;
            cfg.repeats = static_cast<std::size_t>(b_repeats);
            cfg.methods = detail::make_methods(b_methods);
            cfg.seed = b_seed;
            cfg.tol = b_tol;
            cfg.jobs = b_jobs;
            const auto rows = run_bench(cfg);
            write_csv(out, rows);
            detail::write_bench_summary(err, cfg, rows);
            return kExitOk;
        }
        if (*trace) {
            const auto method = detail::make_method(r_method);
            const auto kind = detail::make_kind(r_problem, r_nonneg);
            std::vector<double> w;
            double t = 0.0;
            if (!r_input.empty()) {
                auto v = detail::load_vector(r_input, detail::make_format(r_format), in);
                if (v.empty()) throw UsageError("input vector is empty");
                t = r_t || r_sigma ? detail::resolve_radius(v.size(), r_t, r_sigma) : radius_from_sigma(v.size(), 0.9);
                for (double& x : v) {
                    if (!kind.nonnegative()) x = std::abs(x);
                    else if (kind.shape != Intersection::SphereSphere) x = std::max(x, 0.0);
                }
                w = std::move(v);
            } else {
                BenchConfig cfg;
                cfg.problem = kind;
                const auto type = parse_data_type(r_type);
                if (!type) throw UsageError("unknown data type '" + r_type + "' (expected 1, 2 or 3)");
                cfg.data_type = *type;
                cfg.n = r_n;
                if (r_sigma) cfg.sigma = *r_sigma;
                cfg.t = r_t;
                cfg.seed = r_seed;
                auto inst = make_instance(cfg, 0);
                w = std::move(inst.w);
                t = inst.t;
            }
            const auto rr = trace_run(w, t, method, SolveOptions{r_tol, SolveOptions{}.max_iterations});
            out << "k |U| l probe lambda_next lambda_S r\n";
            for (const auto& row : rr.trace) {
                out << row.k << ' ' << row.active_size << ' ' << detail::fmt_real(row.l) << ' '
                    << detail::fmt_real(row.lower_probe) << ' ' << detail::fmt_real(row.midpoint) << ' '
                    << detail::fmt_real(row.upper_probe) << ' ' << detail::fmt_real(row.r) << '\n';
            }
            err << "method=" << to_string(method) << " root=" << format_shortest(rr.root)
                << " iters=" << rr.iterations << " final_active=" << rr.final_active << '\n';
            return kExitOk;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitSolver;
    }
    return kExitUsage;
}

}  // namespace sparseproj::cli
