#include "lvgraph/error.hpp"

namespace lvg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotConnected: return "NotConnected";
    case ErrorCode::AsymmetricWeight: return "AsymmetricWeight";
    case ErrorCode::NonpositiveMeasure: return "NonpositiveMeasure";
    case ErrorCode::NonpositiveWeight: return "NonpositiveWeight";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::TopologyMismatch: return "TopologyMismatch";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::EmptyBoundary: return "EmptyBoundary";
    case ErrorCode::InteriorNotSubset: return "InteriorNotSubset";
    case ErrorCode::MissingVertexValue: return "MissingVertexValue";
    case ErrorCode::NotBoundaryVertex: return "NotBoundaryVertex";
    case ErrorCode::IsolatedBoundaryVertex: return "IsolatedBoundaryVertex";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::PositivityViolated: return "PositivityViolated";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidProblem: return "InvalidProblem";
    case ErrorCode::NegativeInitial: return "NegativeInitial";
    case ErrorCode::InvalidInitial: return "InvalidInitial";
    case ErrorCode::StepSizeUnstable: return "StepSizeUnstable";
    case ErrorCode::HypothesisNotMet: return "HypothesisNotMet";
    case ErrorCode::RegimeMismatch: return "RegimeMismatch";
    case ErrorCode::EpsilonTooLarge: return "EpsilonTooLarge";
    case ErrorCode::NoAdmissibleSigma: return "NoAdmissibleSigma";
    case ErrorCode::StateOutsideEnvelope: return "StateOutsideEnvelope";
    case ErrorCode::NoPositiveState: return "NoPositiveState";
    case ErrorCode::ConditionK1Violated: return "ConditionK1Violated";
    case ErrorCode::DeltaTooLarge: return "DeltaTooLarge";
    case ErrorCode::PairInvalid: return "PairInvalid";
    case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorCode::RequiresSteadySolve: return "RequiresSteadySolve";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::UnknownExample: return "UnknownExample";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace lvg
