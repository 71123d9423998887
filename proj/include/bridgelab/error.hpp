#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bridgelab {

enum class ErrorCode {
  SymmetryViolation,
  Disconnected,
  LoopPresent,
  DimensionTooSmall,
  VertexUnknown,
  BudgetExceeded,
  NotSpanning,
  WindowTooSmall,
  MissingRate,
  BasisMismatch,
  PrescriptionIncomplete,
  NonPositiveRate,
  NoConvergence,
  RangeTooSmall,
  RNotInRegime,
  WindowLeak,
  UnreachableEndpoint,
  EvaluatorFailure,
  DomainError,
  DegenerateWeights,
  InsufficientTail,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. The code is stable and machine
/// readable; the message names the offending object.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bridgelab
