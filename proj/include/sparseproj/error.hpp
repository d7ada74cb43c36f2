#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sparseproj {

enum class ErrorCode {
    InvalidRadius,
    NoRoot,
    Degenerate,
    DegenerateInput,
    PreconditionFailed,
    NonConvergence,
    Infeasible,
    TooLarge,
    GenerationExhausted,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidRadius: return "InvalidRadius";
        case ErrorCode::NoRoot: return "NoRoot";
        case ErrorCode::Degenerate: return "Degenerate";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::PreconditionFailed: return "PreconditionFailed";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::Infeasible: return "Infeasible";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::GenerationExhausted: return "GenerationExhausted";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace sparseproj
