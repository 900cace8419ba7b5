#pragma once

// Monotone iteration for the gap system started from y_in ∨ gamma.  Stage 0
// is a Bessel path per gap; stage n solves, gap by gap, the one-dimensional
// equation whose compression term is read from stage n-1 at the left end of
// each step.  All stages share one grid and one noise source.

#include <optional>
#include <vector>

#include "dysonflow/configspace.hpp"
#include "dysonflow/interaction.hpp"
#include "dysonflow/noise.hpp"
#include "dysonflow/sde.hpp"

namespace dysonflow {

struct IterationState {
  int stage = -1;                 // last completed stage, -1 before stage 0
  std::vector<PathBundle> paths;  // paths[k] is stage k, every step recorded
  double gamma = 0.0;
  GapConfig y_in;                 // initial data after truncation at gamma
  NoiseSource noise;
  double T = 0.0;
};

// Entrywise max(y_in, gamma); gamma = 0 leaves y_in unchanged.
GapConfig truncate_below(const GapConfig& y_in, double gamma);

IterationState start_iteration(const GapConfig& y_in, double gamma, const NoiseSource& noise,
                               double T);

IterationState iterate_stage(IterationState state, const InteractionParams& params,
                             const SchemeSpec& spec);

// sup over grid and gaps of |a - b| and of (a - b)^+.
double path_sup_diff(const PathBundle& a, const PathBundle& b);
double path_max_excess(const PathBundle& a, const PathBundle& b);

struct DecreasingReport {
  double max_violation = 0.0;           // max over pairs of (Y^(k+1) - Y^(k))^+
  std::vector<double> pair_violation;   // per consecutive pair
  std::vector<double> stage_diffs;      // sup |Y^(k+1) - Y^(k)| per consecutive pair
  bool coupled = true;                  // all stages share seed, stream and grid
  bool pass = false;                    // coupled and max_violation <= tol
};

DecreasingReport check_decreasing(const IterationState& state, double tol);

struct IterationResult {
  PathBundle path;            // last stage, the surrogate for the limit
  int n_used = 0;             // index of the last stage
  std::vector<double> diffs;  // sup |Y^(n) - Y^(n-1)| for n = 1..n_used
  bool converged = false;
};

// Runs stages until sup |Y^(n) - Y^(n-1)| <= eps or n_max stages past stage 0.
// Throws InvariantViolation if a stage exceeds its predecessor by more than
// tol_cmp (default 10 dt).
IterationResult iterate_to_tolerance(const GapConfig& y_in, double gamma, int n_max, double eps,
                                     const InteractionParams& params, const SchemeSpec& spec,
                                     const NoiseSource& noise, double T,
                                     std::optional<double> tol_cmp = std::nullopt);

// gamma_k = 2^-k for k = 1..K.
std::vector<double> gamma_ladder(int K);

}  // namespace dysonflow
