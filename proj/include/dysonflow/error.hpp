#pragma once

#include <stdexcept>
#include <string>

namespace dysonflow {

enum class ErrorCode {
  InvalidConfig,       // Weyl-chamber or positivity invariant broken on construction
  OutOfWindow,         // index outside the stored window
  AnchorMissing,       // particle window does not contain index 0
  NotInvertible,       // gap configuration with an infinite gap cannot be mapped back
  CoincidentParticles, // 1/(x_i - x_j) with x_i == x_j
  SingularDrift,       // zero gap where 1/y is required
  Stability,           // integrator could not keep the state admissible
  InvariantViolation,  // an internal order/inequality check failed
  WindowExhausted,     // configuration does not cover a requested truncation window
  DegeneratePartition, // empty mesoscopic cell; k must increase
  Coverage,            // sampler asked for a window larger than it can cover
  Precondition,        // caller-side hypothesis not met
  Validation,          // run specification rejected
};

const char* to_string(ErrorCode code);

class DysonError : public std::runtime_error {
 public:
  DysonError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dysonflow
