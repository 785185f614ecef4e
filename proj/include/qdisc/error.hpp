#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qdisc {

enum class ErrorKind {
    NonHermitian,
    NumericalFailure,
    NotPositiveDefinite,
    NotPsd,
    DimensionMismatch,
    IndexOutOfRange,
    SingularAggregate,
    DegenerateInstance,
    DegenerateChord,
    NotYetFeasible,
    EmptyFeasibleGrid,
    InvalidArgument,
    ParseError,
};

inline std::string_view to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::NonHermitian: return "NonHermitian";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::NotPsd: return "NotPsd";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::SingularAggregate: return "SingularAggregate";
    case ErrorKind::DegenerateInstance: return "DegenerateInstance";
    case ErrorKind::DegenerateChord: return "DegenerateChord";
    case ErrorKind::NotYetFeasible: return "NotYetFeasible";
    case ErrorKind::EmptyFeasibleGrid: return "EmptyFeasibleGrid";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace qdisc
