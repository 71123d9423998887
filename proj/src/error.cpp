#include "bridgelab/error.hpp"

namespace bridgelab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SymmetryViolation: return "SymmetryViolation";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::LoopPresent: return "LoopPresent";
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::VertexUnknown: return "VertexUnknown";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NotSpanning: return "NotSpanning";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::MissingRate: return "MissingRate";
    case ErrorCode::BasisMismatch: return "BasisMismatch";
    case ErrorCode::PrescriptionIncomplete: return "PrescriptionIncomplete";
    case ErrorCode::NonPositiveRate: return "NonPositiveRate";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::RangeTooSmall: return "RangeTooSmall";
    case ErrorCode::RNotInRegime: return "RNotInRegime";
    case ErrorCode::WindowLeak: return "WindowLeak";
    case ErrorCode::UnreachableEndpoint: return "UnreachableEndpoint";
    case ErrorCode::EvaluatorFailure: return "EvaluatorFailure";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DegenerateWeights: return "DegenerateWeights";
    case ErrorCode::InsufficientTail: return "InsufficientTail";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace bridgelab
