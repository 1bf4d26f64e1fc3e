#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bounce {

enum class ErrorKind {
    OrderUnsupported,
    OutOfWindow,
    DegenerateProfile,
    InvalidPlates,
    NoImpact,
    GrazingImpact,
    BelowValidityThreshold,
    InvalidScale,
    RegionTooLarge,
    CurveInvalid,
    AlternationBroken,
    NonReturn,
    ResonanceBroken,
    TripleCollision,
    ZeroMassSingularity,
    NotPeriodic,
    TooShort,
    LeftDomain,
    MixedScenario,
    EventStorm,
    ConfigInvalid,
    InvalidArgument,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string &what);

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string &what);

} // namespace bounce
