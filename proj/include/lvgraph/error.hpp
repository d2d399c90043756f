#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lvg {

/// Failure categories raised by the library. Each maps to one named error
/// condition of a public operation.
enum class ErrorCode {
  // graph construction and partitions
  NotConnected,
  AsymmetricWeight,
  NonpositiveMeasure,
  NonpositiveWeight,
  SelfLoop,
  TopologyMismatch,
  UnknownVertex,
  EmptyBoundary,
  InteriorNotSubset,
  MissingVertexValue,
  NotBoundaryVertex,
  IsolatedBoundaryVertex,
  // spectral / iterative solvers
  NoConvergence,
  PositivityViolated,
  // dynamics
  InvalidParams,
  InvalidProblem,
  NegativeInitial,
  InvalidInitial,
  StepSizeUnstable,
  // monotone machinery
  HypothesisNotMet,
  RegimeMismatch,
  EpsilonTooLarge,
  NoAdmissibleSigma,
  StateOutsideEnvelope,
  NoPositiveState,
  ConditionK1Violated,
  DeltaTooLarge,
  PairInvalid,
  // classification
  DegenerateTriangle,
  RequiresSteadySolve,
  // cli
  ConfigInvalid,
  IoFailure,
  UnknownExample,
  GridTooLarge,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace lvg
