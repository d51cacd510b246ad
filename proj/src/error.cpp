#include "nuem/error.hpp"

namespace nuem {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NonMonotoneSpectrum: return "NonMonotoneSpectrum";
        case ErrorCode::NegativeCovariance: return "NegativeCovariance";
        case ErrorCode::NegativeExponent: return "NegativeExponent";
        case ErrorCode::TruncationTooLarge: return "TruncationTooLarge";
        case ErrorCode::ZeroSteps: return "ZeroSteps";
        case ErrorCode::EmptyLevels: return "EmptyLevels";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::ReversedWindow: return "ReversedWindow";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonFiniteState: return "NonFiniteState";
        case ErrorCode::NonUniformInput: return "NonUniformInput";
        case ErrorCode::StateDependentDiffusion: return "StateDependentDiffusion";
        case ErrorCode::AllPathsFailed: return "AllPathsFailed";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
    }
    return "Unknown";
}

}  // namespace nuem
