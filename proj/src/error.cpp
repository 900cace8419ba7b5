#include "dysonflow/error.hpp"

namespace dysonflow {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig: return "invalid-config";
    case ErrorCode::OutOfWindow: return "out-of-window";
    case ErrorCode::AnchorMissing: return "anchor-missing";
    case ErrorCode::NotInvertible: return "not-invertible";
    case ErrorCode::CoincidentParticles: return "coincident-particles";
    case ErrorCode::SingularDrift: return "singular-drift";
    case ErrorCode::Stability: return "stability";
    case ErrorCode::InvariantViolation: return "invariant-violation";
    case ErrorCode::WindowExhausted: return "window-exhausted";
    case ErrorCode::DegeneratePartition: return "degenerate-partition";
    case ErrorCode::Coverage: return "coverage";
    case ErrorCode::Precondition: return "precondition";
    case ErrorCode::Validation: return "validation";
  }
  return "unknown";
}

}  // namespace dysonflow
