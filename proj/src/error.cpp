#include "cute/error.hpp"

namespace cute {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NonConvergedEigensolve: return "NonConvergedEigensolve";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::BasisTooLarge: return "BasisTooLarge";
    case ErrorKind::MissingOverlap: return "MissingOverlap";
    case ErrorKind::BasisMismatch: return "BasisMismatch";
    case ErrorKind::NonConverged: return "NonConverged";
    case ErrorKind::BathTooLarge: return "BathTooLarge";
    case ErrorKind::WindowOutsideNyquist: return "WindowOutsideNyquist";
    case ErrorKind::UnknownSpecies: return "UnknownSpecies";
    case ErrorKind::OrderMismatch: return "OrderMismatch";
    case ErrorKind::OrderTooHigh: return "OrderTooHigh";
    case ErrorKind::DimensionCap: return "DimensionCap";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::BandMiss: return "BandMiss";
    case ErrorKind::RecurrenceContamination: return "RecurrenceContamination";
    }
    return "Unknown";
}

bool is_config_error(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::ConfigInvalid:
    case ErrorKind::ParseError:
    case ErrorKind::BasisTooLarge:
    case ErrorKind::BathTooLarge:
    case ErrorKind::DimensionCap:
    case ErrorKind::UnknownSpecies:
    case ErrorKind::OrderMismatch:
    case ErrorKind::OrderTooHigh:
    case ErrorKind::WindowOutsideNyquist:
    case ErrorKind::GridMismatch:
        return true;
    default:
        return false;
    }
}

} // namespace cute
