#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cute {

enum class ErrorKind {
    InvalidArgument,
    ConfigInvalid,
    ParseError,
    NonConvergedEigensolve,
    GridTooCoarse,
    GridMismatch,
    BasisTooLarge,
    MissingOverlap,
    BasisMismatch,
    NonConverged,
    BathTooLarge,
    WindowOutsideNyquist,
    UnknownSpecies,
    OrderMismatch,
    OrderTooHigh,
    DimensionCap,
    NotSymmetric,
    BandMiss,
    RecurrenceContamination,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// True for errors caused by bad user input rather than numerical failure.
bool is_config_error(ErrorKind kind) noexcept;

} // namespace cute
