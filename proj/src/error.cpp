#include "bounce/error.hpp"

namespace bounce {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::OrderUnsupported: return "OrderUnsupported";
    case ErrorKind::OutOfWindow: return "OutOfWindow";
    case ErrorKind::DegenerateProfile: return "DegenerateProfile";
    case ErrorKind::InvalidPlates: return "InvalidPlates";
    case ErrorKind::NoImpact: return "NoImpact";
    case ErrorKind::GrazingImpact: return "GrazingImpact";
    case ErrorKind::BelowValidityThreshold: return "BelowValidityThreshold";
    case ErrorKind::InvalidScale: return "InvalidScale";
    case ErrorKind::RegionTooLarge: return "RegionTooLarge";
    case ErrorKind::CurveInvalid: return "CurveInvalid";
    case ErrorKind::AlternationBroken: return "AlternationBroken";
    case ErrorKind::NonReturn: return "NonReturn";
    case ErrorKind::ResonanceBroken: return "ResonanceBroken";
    case ErrorKind::TripleCollision: return "TripleCollision";
    case ErrorKind::ZeroMassSingularity: return "ZeroMassSingularity";
    case ErrorKind::NotPeriodic: return "NotPeriodic";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::LeftDomain: return "LeftDomain";
    case ErrorKind::MixedScenario: return "MixedScenario";
    case ErrorKind::EventStorm: return "EventStorm";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string &what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
{
}

void raise(ErrorKind kind, const std::string &what)
{
    throw Error(kind, what);
}

} // namespace bounce
