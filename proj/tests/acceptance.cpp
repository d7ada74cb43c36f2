// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "test_support.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

using namespace sparseproj;
using sptest::l1;
using sptest::l2;
using sptest::max_abs_diff;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

double mean(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size()); }

// Shared by criteria 1 and 7.
std::vector<sptest::SmallInstance> oracle_instances() {
    Rng rng(2024);
    std::vector<sptest::SmallInstance> out;
    for (std::size_t rep = 0; rep < 600; ++rep) out.push_back(sptest::random_small_instance(rng, rep, 2, 10));
    return out;
}

Outcome oracle_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_obj = 0.0;
    double worst_x = 0.0;
    std::size_t unique = 0;
    const auto insts = oracle_instances();
    for (const auto& inst : insts) {
        const auto o = oracle_project(inst.v, inst.t, inst.kind);
        const auto sol = project(inst.v, inst.t, inst.kind);
        worst_obj = std::max(worst_obj, std::abs(objective(sol.x, inst.v) - o.best_objective));
        if (sol.unique) {
            ++unique;
            worst_x = std::max(worst_x, max_abs_diff(sol.x, o.best_x));
        }
    }
    const double secs = seconds_since(t0);
    return {worst_obj <= 1e-8 && worst_x <= 1e-6 && secs <= 60.0,
            fmt("%zu instances (%zu unique), max |obj gap| %.3g, max |x gap| %.3g, %.1f s", insts.size(), unique, worst_obj,
                worst_x, secs)};
}

Outcome root_agreement() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(77);
    std::size_t checked = 0;
    double worst = 0.0;
    while (checked < 500) {
        const std::size_t n = 2 + rng.below(500);
        auto v = generate(static_cast<DataType>(1 + checked % 3), n, rng);
        if (checked % 2) for (double& x : v) x = std::abs(x);
        const double t = radius_from_sigma(n, 0.05 + 0.9 * rng.uniform());
        const auto [top, vmax] = count_max(v);
        (void)vmax;
        if (!(t > 1.0) || compare_count(top, t * t) >= 0) continue;
        const double ref = oracle_phi_root(v, t).root;
        for (Method m : {Method::FS, Method::BM, Method::SSNSB, Method::QASB})
            worst = std::max(worst, std::abs(solve_phi_root(v, t, m).root - ref));
        ++checked;
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-7 && secs <= 30.0, fmt("%zu instances, max root gap %.3g, %.1f s", checked, worst, secs)};
}

Outcome iteration_counts() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for (auto type : {DataType::Type1, DataType::Type2, DataType::Type3}) {
        BenchConfig cfg;
        cfg.n = 100000;
        cfg.data_type = type;
        cfg.repeats = 100;
        cfg.methods = {Method::BM, Method::SSNSB, Method::QASB};
        cfg.seed = 3000 + static_cast<std::uint64_t>(type);
        std::vector<double> it[3];
        for (const auto& row : run_bench(cfg)) {
            const std::size_t k = row.method == Method::BM ? 0 : row.method == Method::SSNSB ? 1 : 2;
            it[k].push_back(static_cast<double>(row.iterations));
        }
        const double bm = mean(it[0]), ss = mean(it[1]), qa = mean(it[2]);
        ok = ok && bm >= 25.0 && bm <= 35.0 && ss <= 12.0 && qa <= 10.0 && qa <= ss && ss <= bm;
        detail += fmt("type %d BM %.2f SSNSB %.2f QASB %.2f; ", static_cast<int>(type), bm, ss, qa);
    }
    const double secs = seconds_since(t0);
    return {ok && secs <= 120.0, detail + fmt("%.1f s", secs)};
}

Outcome scaling() {
    const auto t0 = std::chrono::steady_clock::now();
    auto run = [](std::size_t n) {
        BenchConfig cfg;
        cfg.n = n;
        cfg.repeats = 20;
        cfg.methods = {Method::FS, Method::BM, Method::QASB};
        cfg.seed = 4000;
        std::vector<double> t[3];
        for (const auto& row : run_bench(cfg)) {
            const std::size_t k = row.method == Method::FS ? 0 : row.method == Method::BM ? 1 : 2;
            t[k].push_back(static_cast<double>(row.time_ns));
        }
        return std::array<std::vector<double>, 3>{t[0], t[1], t[2]};
    };
    const auto small = run(100000);
    const auto big = run(1000000);
    const double fs = median(big[0]), bm = median(big[1]), qa = median(big[2]);
    const double growth = std::accumulate(big[2].begin(), big[2].end(), 0.0) /
                          std::accumulate(small[2].begin(), small[2].end(), 0.0);
    const double secs = seconds_since(t0);
    return {qa <= fs / 3.0 && qa <= bm && growth <= 15.0 && secs <= 300.0,
            fmt("n=1e6 medians FS %.2f ms BM %.2f ms QASB %.2f ms (FS/QASB %.1fx); QASB total 1e5->1e6 x%.2f; %.1f s",
                fs * 1e-6, bm * 1e-6, qa * 1e-6, fs / qa, growth, secs)};
}

Outcome trace_behavior() {
    BenchConfig cfg;
    cfg.n = 100;
    cfg.seed = 5000;
    std::size_t runs = 0, monotone = 0, emptied = 0, short_runs = 0, max_it = 0;
    for (std::size_t k = 0; k < 100; ++k) {
        const auto inst = make_instance(cfg, k);
        const auto r = trace_run(inst.w, inst.t, Method::QASB);
        ++runs;
        bool mono = true;
        for (std::size_t i = 1; i < r.trace.size(); ++i) mono = mono && r.trace[i].active_size <= r.trace[i - 1].active_size;
        monotone += mono;
        emptied += r.final_active == 0;
        short_runs += r.iterations <= 6;
        max_it = std::max(max_it, r.iterations);
    }
    return {monotone == runs && emptied == runs && short_runs * 10 >= runs * 9,
            fmt("%zu runs: |U| nonincreasing in %zu, final |U| = 0 in %zu, <= 6 iterations in %zu (max %zu)", runs, monotone,
                emptied, short_runs, max_it)};
}

Outcome fixtures() {
    bool ok = true;
    std::string detail;
    const ProblemKind ss{Intersection::SphereSphere, Restriction::Nonnegative};
    const ProblemKind bb{Intersection::BallBall, Restriction::Nonnegative};

    const std::vector<double> a{1, 1, 0};
    const auto xa = project(a, std::sqrt(2.0), ss).x;
    const double ea = max_abs_diff(xa, std::vector<double>{std::sqrt(0.5), std::sqrt(0.5), 0.0});
    ok = ok && ea <= 1e-12;
    detail += fmt("(1,1,0): err %.2g; ", ea);

    // Reference x values are regenerated by the brute-force oracle.
    const std::vector<double> b{2, 1};
    const auto sb = project(b, 1.2, bb);
    const auto ob = oracle_project(b, 1.2, bb);
    const double lb = std::abs(sb.lambda_star - 0.698216);
    const double eb = max_abs_diff(sb.x, ob.best_x);
    ok = ok && lb <= 1e-6 && eb <= 1e-6;
    detail += fmt("(2,1): lambda %.9f, x = (%.7f, %.7f), oracle gap %.2g; ", sb.lambda_star, sb.x[0], sb.x[1], eb);

    const std::vector<double> c{1, 0, 0};
    const double rc = solve_phi_root(c, 1.2, Method::QASB).root;
    ok = ok && std::abs(rc - (-0.119578)) <= 1e-6;
    detail += fmt("(1,0,0): lambda %.9f", rc);
    return {ok, detail};
}

Outcome certificates() {
    bool ok = true;
    double gap = 0.0, comp = 0.0;
    std::size_t unique = 0;
    for (const auto& inst : oracle_instances()) {
        const auto sol = project(inst.v, inst.t, inst.kind);
        if (!sol.unique) continue;
        ++unique;
        gap = std::max(gap, std::abs(dual_certificate(inst.v, inst.t, inst.kind, sol) - objective(sol.x, inst.v)));
        std::vector<double> ax(sol.x);
        for (double& x : ax) x = std::abs(x);
        if (inst.kind.shape != Intersection::SphereSphere)
            comp = std::max(comp, std::abs(sol.lambda_star * (l1(ax) - inst.t)));
        if (inst.kind.shape == Intersection::BallBall)
            comp = std::max(comp, std::abs(sol.mu_star * (l2(ax) * l2(ax) - 1.0)));
    }
    ok = ok && gap <= 1e-7 && comp <= 1e-8;

    Rng rng(7000);
    const Intersection shapes[3] = {Intersection::BallBall, Intersection::BallSphere, Intersection::SphereSphere};
    std::size_t sign_bad = 0, perm_checked = 0;
    double perm_err = 0.0;
    // Non-unique instances are skipped, so draw until 200 have been checked.
    for (std::size_t rep = 0; perm_checked < 200; ++rep) {
        const ProblemKind kind{shapes[rep % 3], Restriction::Signed};
        const std::size_t n = 2 + rng.below(40);
        const auto v = sptest::random_vector(rng, n, static_cast<DataType>(1 + rep % 3));
        const double t = sptest::random_radius(rng, n, kind.shape);
        const auto sol = project(v, t, kind);
        for (std::size_t i = 0; i < n; ++i) sign_bad += v[i] * sol.x[i] < 0.0;
        if (!sol.unique) continue;
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(perm);
        std::vector<double> pv(n);
        for (std::size_t i = 0; i < n; ++i) pv[i] = v[perm[i]];
        const auto psol = project(pv, t, kind);
        for (std::size_t i = 0; i < n; ++i) perm_err = std::max(perm_err, std::abs(psol.x[i] - sol.x[perm[i]]));
        ++perm_checked;
    }
    ok = ok && sign_bad == 0 && perm_err <= 1e-10;

    std::size_t scale_checked = 0;
    double scale_err = 0.0;
    for (std::size_t rep = 0; scale_checked < 200; ++rep) {
        const ProblemKind kind{rep % 2 ? Intersection::SphereSphere : Intersection::BallSphere,
                               (rep / 2) % 2 ? Restriction::Signed : Restriction::Nonnegative};
        const std::size_t n = 2 + rng.below(40);
        const auto v = sptest::random_vector(rng, n, static_cast<DataType>(1 + rep % 3));
        const double t = sptest::random_radius(rng, n, kind.shape);
        const auto sol = project(v, t, kind);
        if (!sol.unique) continue;
        const double alpha = std::exp(-3.0 + 6.0 * rng.uniform());
        std::vector<double> sv(v);
        for (double& x : sv) x *= alpha;
        scale_err = std::max(scale_err, max_abs_diff(project(sv, t, kind).x, sol.x));
        ++scale_checked;
    }
    ok = ok && scale_err <= 1e-9;
    return {ok, fmt("%zu unique: max gap %.3g, max complementarity %.3g; signs violated %zu, permutation err %.3g on %zu; "
                    "scale err %.3g on %zu",
                    unique, gap, comp, sign_bad, perm_err, perm_checked, scale_err, scale_checked)};
}

Outcome auxiliary_properties() {
    Rng rng(8000);
    auto draw = [&](std::size_t n_hi, int rep) {
        auto v = sptest::random_vector(rng, 2 + rng.below(n_hi - 1), static_cast<DataType>(1 + rep % 3));
        const double t = 1.0 + (std::sqrt(static_cast<double>(v.size())) - 1.0) * rng.uniform();
        return std::pair{std::move(v), t};
    };

    // Piece continuity at every breakpoint past j_t.
    std::size_t cont_inst = 0, cont_bad = 0;
    for (int rep = 0; rep < 250; ++rep) {
        const auto [v, t] = draw(40, rep);
        const auto bp = compute_breakpoints(v, t);
        if (bp.jt + 1 >= bp.size()) continue;
        ++cont_inst;
        for (std::size_t j = bp.jt + 1; j < bp.size(); ++j) {
            const double lam = bp.values[j];
            const auto here = compute_stats(v, lam);
            const double a = eval_phi(here, lam, t);
            const double b = eval_phi(compute_stats(v, bp.values[j - 1]), lam, t);
            cont_bad += std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), here.sum * here.sum});
        }
    }

    // Max-of-pieces as stated: the maximum over every piece from j_t to k.
    // The anchored form keeps only pieces j_t..j where lambda lies on piece j.
    std::size_t max_inst = 0, literal_bad = 0, anchored_bad = 0, samples = 0;
    double literal_worst = 0.0;
    for (int rep = 0; rep < 250; ++rep) {
        const auto [v, t] = draw(50, rep);
        const auto bp = compute_breakpoints(v, t);
        if (bp.jt >= bp.size()) continue;
        ++max_inst;
        const double top = bp.values[bp.jt];
        const double bottom = bp.values.back() - 1.0;
        for (int s = 0; s < 100; ++s) {
            const double lam = bottom + (top - bottom) * rng.uniform();
            std::size_t here = bp.jt;
            while (here + 1 < bp.size() && bp.values[here + 1] >= lam) ++here;
            double all = -std::numeric_limits<double>::infinity();
            double anchored = all;
            for (std::size_t j = bp.jt; j < bp.size(); ++j) {
                const double q = eval_phi(compute_stats(v, bp.values[j]), lam, t);
                all = std::max(all, q);
                if (j <= here) anchored = std::max(anchored, q);
            }
            const double f = eval_phi(v, lam, t);
            const double tol = 1e-10 * std::max(1.0, std::abs(f));
            literal_bad += std::abs(f - all) > tol;
            anchored_bad += std::abs(f - anchored) > tol;
            literal_worst = std::max(literal_worst, std::abs(f - all));
            ++samples;
        }
    }

    // Bracket bounds on instances meeting the three hypotheses.
    std::size_t br_inst = 0, br_bad = 0;
    for (int rep = 0; br_inst < 250 && rep < 20000; ++rep) {
        auto [v, t] = draw(40, rep);
        for (double& x : v) x = std::abs(x);
        const auto nv = sptest::l1(v);
        if (!(nv > t) || !(nv > t * l2(v))) continue;
        const double hat = psi_root(v, t);
        double rest = 0.0;
        for (double x : v) rest += std::max(x - hat, 0.0) * std::max(x - hat, 0.0);
        if (!(std::sqrt(rest) > 1.0)) continue;
        const auto b = initial_bracket(v, t);
        ++br_inst;
        br_bad += !(eval_phi(v, b.l, t) > 0.0) || !(eval_phi(v, b.r, t) < 0.0);
    }

    // phi(lambda_Q) >= 0 at every QASB iteration, up to the rounding of phi.
    std::size_t q_inst = 0, q_rows = 0, q_bad = 0;
    for (int rep = 0; q_inst < 250 && rep < 20000; ++rep) {
        const auto [v, t] = draw(60, rep);
        const auto [top, vmax] = count_max(v);
        (void)vmax;
        if (compare_count(top, t * t) >= 0 || top == v.size() || compare_count(v.size(), t * t) <= 0) continue;
        const auto r = solve_phi_root(v, t, Method::QASB);
        ++q_inst;
        for (const auto& row : r.trace) {
            if (std::isnan(row.lower_probe)) continue;
            ++q_rows;
            const auto st = compute_stats(v, row.lower_probe);
            q_bad += eval_phi(st, row.lower_probe, t) < -sptest::phi_rounding_bound(st, row.lower_probe, t);
        }
    }

    const bool ok = cont_inst >= 200 && cont_bad == 0 && max_inst >= 200 && literal_bad == 0 && br_inst >= 200 &&
                    br_bad == 0 && q_inst >= 200 && q_bad == 0;
    return {ok, fmt("continuity %zu bad on %zu; max-of-pieces over all pieces %zu of %zu samples off (worst %.3g), "
                    "anchored form %zu off, on %zu; bracket %zu bad on %zu; phi(lambda_Q) %zu bad in %zu rows on %zu",
                    cont_bad, cont_inst, literal_bad, samples, literal_worst, anchored_bad, max_inst, br_bad, br_inst,
                    q_bad, q_rows, q_inst)};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"oracle equivalence", oracle_equivalence},
        {"cross-method root agreement", root_agreement},
        {"iteration counts at n = 1e5", iteration_counts},
        {"scaling ordering at n = 1e6", scaling},
        {"trace behavior at n = 100", trace_behavior},
        {"fixed fixtures", fixtures},
        {"certificate suite", certificates},
        {"auxiliary-function properties", auxiliary_properties},
    };
    int failed = 0;
    int index = 1;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", index++, name, o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed ? 1 : 0;
}
