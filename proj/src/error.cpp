#include "superkrylov/error.hpp"

namespace superkrylov {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeCoupling: return "NegativeCoupling";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonBipartiteEdge: return "NonBipartiteEdge";
    case ErrorCode::DimensionCap: return "DimensionCap";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OverlapOutOfRange: return "OverlapOutOfRange";
    case ErrorCode::BadWindow: return "BadWindow";
    case ErrorCode::NonPositiveBound: return "NonPositiveBound";
    case ErrorCode::BadHorizon: return "BadHorizon";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::OutOfHorizon: return "OutOfHorizon";
    case ErrorCode::BVPSolveFailure: return "BVPSolveFailure";
    case ErrorCode::MissingFit: return "MissingFit";
    case ErrorCode::AllModesThresholded: return "AllModesThresholded";
    case ErrorCode::MissingTopEnergy: return "MissingTopEnergy";
    case ErrorCode::ZeroWidth: return "ZeroWidth";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigParse: return "ConfigParse";
  }
  return "Unknown";
}

}  // namespace superkrylov
