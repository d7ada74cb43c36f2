// Projects a few vectors onto each of the three intersections and prints the
// solution together with its multipliers and the root-finding work done.

#include <sparseproj/sparseproj.hpp>

#include <cstdio>
#include <vector>

using namespace sparseproj;

static void show(const char* title, const std::vector<double>& v, double t, ProblemKind kind) {
    const auto sol = project(v, t, kind);
    std::printf("%s  t=%g  [%s]\n  x =", title, t, to_string(kind).c_str());
    for (double x : sol.x) std::printf(" %.9f", x);
    std::printf("\n  case=%s lambda=%.9f mu=%.9f iters=%zu unique=%s\n", std::string(to_string(sol.case_label)).c_str(),
                sol.lambda_star, sol.mu_star, sol.iterations, sol.unique ? "true" : "false");
    std::printf("  objective=%.12f dual=%.12f\n\n", objective(sol.x, v),
                dual_certificate(v, t, kind, sol));
}

int main() {
    const ProblemKind bb{Intersection::BallBall, Restriction::Nonnegative};
    const ProblemKind bs{Intersection::BallSphere, Restriction::Signed};
    const ProblemKind ss{Intersection::SphereSphere, Restriction::Nonnegative};

    show("both constraints bind", {2.0, 1.0}, 1.2, bb);
    show("only the l1 ball binds", {0.9, 0.8}, 1.2, bb);
    show("signed input, sign restored", {-2.0, 1.0, 0.25}, 1.2, bs);
    show("negative threshold", {1.0, 0.0, 0.0}, 1.2, ss);

    // A larger instance: compare the four root finders on the same vector.
    Rng rng(42);
    auto v = gen_type1(100000, rng);
    for (double& x : v) x = std::abs(x);
    const double t = radius_from_sigma(v.size(), 0.9);
    for (Method m : {Method::FS, Method::BM, Method::SSNSB, Method::QASB}) {
        const auto rr = solve_phi_root(v, t, m);
        std::printf("%-6s root=%.12f iterations=%zu\n", std::string(to_string(m)).c_str(), rr.root, rr.iterations);
    }
    return 0;
}
