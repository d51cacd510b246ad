#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nuem {

enum class ErrorCode {
    NonMonotoneSpectrum,
    NegativeCovariance,
    NegativeExponent,
    TruncationTooLarge,
    ZeroSteps,
    EmptyLevels,
    IndexOutOfRange,
    ReversedWindow,
    GridMismatch,
    DimensionMismatch,
    NonFiniteState,
    NonUniformInput,
    StateDependentDiffusion,
    AllPathsFailed,
    InvalidArgument,
    ParseError,
    ValidationError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Library error. Every failure carries a machine-readable code; solver
/// failures additionally carry the merged step index at which they occurred.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message,
          std::optional<std::size_t> step = std::nullopt)
        : std::runtime_error(message), code_(code), step_(step) {}

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::size_t> step() const noexcept { return step_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> step_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace nuem
