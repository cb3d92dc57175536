#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qprep {

using cplx = std::complex<double>;

/// Amplitudes with magnitude at or below this are treated as exactly zero
/// wherever a routine takes an epsilon with a default.
inline constexpr double kEpsZero = 1e-12;

/// Tolerance for comparing angles / unitaries (separability scan etc.).
inline constexpr double kEpsAngle = 1e-8;

/// Qubit 0 is the most significant bit of a basis index.
/// bit_of(k, q, n) extracts the digit of qubit q from index k.
inline constexpr int bit_of(std::uint64_t k, int q, int n) {
    return static_cast<int>((k >> (n - 1 - q)) & 1u);
}

enum class ErrorCode {
    ZeroVector,
    DimensionMismatch,
    NotNormalized,
    NoValidPath,
    TooLarge,
    UnloweredGate,
    IndexOutOfRange,
    LevelMismatch,
    DeadSubtree,
    ToleranceExceeded,
    NotAdjacent,
    ConvergenceFailure,
    ParseError,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NotNormalized: return "NotNormalized";
        case ErrorCode::NoValidPath: return "NoValidPath";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::UnloweredGate: return "UnloweredGate";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::LevelMismatch: return "LevelMismatch";
        case ErrorCode::DeadSubtree: return "DeadSubtree";
        case ErrorCode::ToleranceExceeded: return "ToleranceExceeded";
        case ErrorCode::NotAdjacent: return "NotAdjacent";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace qprep
