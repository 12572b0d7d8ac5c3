#pragma once

#include <stdexcept>
#include <string>

namespace swapfit {

enum class ErrorKind {
    FileNotFound,
    ParseError,
    DuplicateQuarter,
    NonFiniteValue,
    EmptyIntersection,
    NonPositiveFactor,
    InverseDomain,
    DegenerateDesign,
    NonMonotoneFit,
    TrustRegionExhausted,
    NonPositiveSample,
    AllRestartsFailed,
    DomainError,
    AllOneSided,
    InsufficientData,
    SingularDesign,
    InvalidArgument,
    RangeExhausted,
    TooLarge,
    LengthMismatch,
    MissingFit,
};

const char* to_string(ErrorKind kind);

// Every failure the library reports carries a kind so callers (and the CLI
// exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace swapfit
