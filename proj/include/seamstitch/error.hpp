#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace seamstitch {

enum class ErrorCode {
    TooFewMatches,
    DegenerateConfiguration,
    SingularProjection,
    SingularTransform,
    EmptyMask,
    ImageTooSmall,
    NoMatchesFound,
    ParseError,
    BoundsError,
    IoError,
    NoOverlap,
    NumericalFailure,
    LatticeTooSmall,
    EmptyOverlap,
    DimensionMismatch,
    OffsetOutOfFrame,
    NoPairs,
    NoClusters,
    ChainTooShort,
    AllSegmentsInvalid,
    NoAnchors,
    CoverageHole,
    MaskTooSmall,
    InvalidSpec,
    ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code. `index()` is set for
/// per-entry failures such as BoundsError.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message,
          std::optional<std::size_t> index = std::nullopt)
        : std::runtime_error(message), code_(code), index_(index) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] std::optional<std::size_t> index() const noexcept { return index_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> index_;
};

}  // namespace seamstitch
