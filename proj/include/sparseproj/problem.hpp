#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace sparseproj {

/// Which pair of l1/l2 sets the projection targets.
enum class Intersection {
    BallBall,      // ||x||_1 <= t, ||x||_2 <= 1
    BallSphere,    // ||x||_1 <= t, ||x||_2 == 1
    SphereSphere,  // ||x||_1 == t, ||x||_2 == 1
};

enum class Restriction { Signed, Nonnegative };

struct ProblemKind {
    Intersection shape = Intersection::BallBall;
    Restriction restriction = Restriction::Signed;

    bool nonnegative() const noexcept { return restriction == Restriction::Nonnegative; }
    friend bool operator==(const ProblemKind&, const ProblemKind&) = default;
};

/// Root-finding method used on the auxiliary function.
enum class Method { FS, BM, SSNSB, QASB };

constexpr std::string_view to_string(Intersection s) noexcept {
    switch (s) {
        case Intersection::BallBall: return "b1b2";
        case Intersection::BallSphere: return "b1s2";
        case Intersection::SphereSphere: return "s1s2";
    }
    return "?";
}

constexpr std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::FS: return "fs";
        case Method::BM: return "bm";
        case Method::SSNSB: return "ssnsb";
        case Method::QASB: return "qasb";
    }
    return "?";
}

inline std::string to_string(const ProblemKind& kind) {
    std::string out(to_string(kind.shape));
    if (kind.nonnegative()) out += "-nonneg";
    return out;
}

inline std::optional<Intersection> parse_intersection(std::string_view s) {
    if (s == "b1b2") return Intersection::BallBall;
    if (s == "b1s2") return Intersection::BallSphere;
    if (s == "s1s2") return Intersection::SphereSphere;
    return std::nullopt;
}

inline std::optional<Method> parse_method(std::string_view s) {
    if (s == "fs") return Method::FS;
    if (s == "bm") return Method::BM;
    if (s == "ssnsb") return Method::SSNSB;
    if (s == "qasb") return Method::QASB;
    return std::nullopt;
}

}  // namespace sparseproj
