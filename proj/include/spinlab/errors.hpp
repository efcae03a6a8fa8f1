#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spinlab {

enum class ErrorCode {
    InvalidArgument,
    NonBipartite,
    UnknownVertex,
    DuplicateVertex,
    TerminalOverlap,
    TerminalLayout,
    DegreeBoundViolated,
    TooLarge,
    ZeroPartitionFunction,
    DomainError,
    NotAntiferromagnetic,
    NoConvergence,
    Infeasible,
    InfeasibleSizes,
    RejectionLimitExceeded,
    NotEnoughTerminals,
    DegenerateInstance,
    DegenerateParameters,
};

inline std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonBipartite: return "NonBipartite";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::DuplicateVertex: return "DuplicateVertex";
    case ErrorCode::TerminalOverlap: return "TerminalOverlap";
    case ErrorCode::TerminalLayout: return "TerminalLayout";
    case ErrorCode::DegreeBoundViolated: return "DegreeBoundViolated";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ZeroPartitionFunction: return "ZeroPartitionFunction";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NotAntiferromagnetic: return "NotAntiferromagnetic";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::InfeasibleSizes: return "InfeasibleSizes";
    case ErrorCode::RejectionLimitExceeded: return "RejectionLimitExceeded";
    case ErrorCode::NotEnoughTerminals: return "NotEnoughTerminals";
    case ErrorCode::DegenerateInstance: return "DegenerateInstance";
    case ErrorCode::DegenerateParameters: return "DegenerateParameters";
    }
    return "Unknown";
}

/// Domain error raised by every spinlab operation. The code is stable and is
/// what the CLI reports in its machine-readable error object.
class SpinError : public std::runtime_error {
public:
    SpinError(ErrorCode code, const std::string& what)
        : std::runtime_error(what)
        , code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what)
{
    throw SpinError(code, what);
}

} // namespace spinlab
