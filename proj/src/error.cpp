#include "graze/error.hpp"

namespace graze {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DomainExceeded: return "DomainExceeded";
        case ErrorCode::HDomainExceeded: return "HDomainExceeded";
        case ErrorCode::OrderTooHigh: return "OrderTooHigh";
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::NotNormalized: return "NotNormalized";
        case ErrorCode::InvalidObstacle: return "InvalidObstacle";
        case ErrorCode::SourceOnBoundary: return "SourceOnBoundary";
        case ErrorCode::ShadowPoint: return "ShadowPoint";
        case ErrorCode::NotGrazing: return "NotGrazing";
        case ErrorCode::GrazingSingular: return "GrazingSingular";
        case ErrorCode::StepInvalid: return "StepInvalid";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::OutsideRange: return "OutsideRange";
        case ErrorCode::NotHomogeneous: return "NotHomogeneous";
        case ErrorCode::SeedNotFound: return "SeedNotFound";
        case ErrorCode::StepCollapse: return "StepCollapse";
        case ErrorCode::InsufficientPoints: return "InsufficientPoints";
        case ErrorCode::SliceMiss: return "SliceMiss";
        case ErrorCode::InvalidBudget: return "InvalidBudget";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace graze
