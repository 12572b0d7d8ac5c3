#include "swapfit/error.hpp"

namespace swapfit {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::FileNotFound: return "FileNotFound";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::DuplicateQuarter: return "DuplicateQuarter";
        case ErrorKind::NonFiniteValue: return "NonFiniteValue";
        case ErrorKind::EmptyIntersection: return "EmptyIntersection";
        case ErrorKind::NonPositiveFactor: return "NonPositiveFactor";
        case ErrorKind::InverseDomain: return "InverseDomain";
        case ErrorKind::DegenerateDesign: return "DegenerateDesign";
        case ErrorKind::NonMonotoneFit: return "NonMonotoneFit";
        case ErrorKind::TrustRegionExhausted: return "TrustRegionExhausted";
        case ErrorKind::NonPositiveSample: return "NonPositiveSample";
        case ErrorKind::AllRestartsFailed: return "AllRestartsFailed";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::AllOneSided: return "AllOneSided";
        case ErrorKind::InsufficientData: return "InsufficientData";
        case ErrorKind::SingularDesign: return "SingularDesign";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::RangeExhausted: return "RangeExhausted";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::MissingFit: return "MissingFit";
    }
    return "Unknown";
}

}  // namespace swapfit
