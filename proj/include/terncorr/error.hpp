// include/terncorr/error.hpp: error type shared by every terncorr component.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace terncorr {

enum class ErrorCode {
    ModulusNotIrreducible,
    ModulusNotPrimitive,
    NoPrimitiveFound,
    DivisionByZero,
    ContextMismatch,
    InvalidSubfield,
    InvalidArgument,
    KNotOdd,
    Overflow,
    LengthMismatch,
    FeasibilityRefused,
    BasisNotIndependent,
    ParityViolation,
    Parse,
    Io,
};

inline std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::ModulusNotIrreducible: return "ModulusNotIrreducible";
    case ErrorCode::ModulusNotPrimitive: return "ModulusNotPrimitive";
    case ErrorCode::NoPrimitiveFound: return "NoPrimitiveFound";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::ContextMismatch: return "ContextMismatch";
    case ErrorCode::InvalidSubfield: return "InvalidSubfield";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::KNotOdd: return "KNotOdd";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::FeasibilityRefused: return "FeasibilityRefused";
    case ErrorCode::BasisNotIndependent: return "BasisNotIndependent";
    case ErrorCode::ParityViolation: return "ParityViolation";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace terncorr
