#include "dysonflow/iteration.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dysonflow/error.hpp"

namespace dysonflow {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw DysonError(code, msg); }

PathBundle empty_bundle(const IterationState& s, const SchemeSpec& spec) {
  PathBundle b;
  b.kind = PathBundle::Kind::Gaps;
  b.offset = s.y_in.offset();
  b.seed = s.noise.seed();
  b.stream = s.noise.stream();
  b.dt = spec.dt;
  b.record_every = 1;
  return b;
}

// Distances z_(a,i) from gap `local` to every particle of the window with
// |i - a| > 1, read from the gap vector z.
void distances(std::span<const double> z, std::size_t local, std::vector<double>& out) {
  out.clear();
  double acc = 0.0;
  for (std::size_t k = local + 1; k < z.size(); ++k) {
    acc += z[k];
    out.push_back(acc);
  }
  acc = 0.0;
  for (std::size_t k = local; k-- > 0;) {
    acc += z[k];
    out.push_back(acc);
  }
}

}  // namespace

GapConfig truncate_below(const GapConfig& y_in, double gamma) {
  std::vector<double> v(y_in.values().begin(), y_in.values().end());
  for (double& g : v) g = std::max(g, gamma);
  return GapConfig(y_in.offset(), std::move(v), y_in.infinite_outside());
}

IterationState start_iteration(const GapConfig& y_in, double gamma, const NoiseSource& noise,
                               double T) {
  if (!(gamma >= 0.0)) fail(ErrorCode::Precondition, "gamma must be >= 0");
  if (!y_in.all_finite()) fail(ErrorCode::Precondition, "iteration needs finite initial gaps");
  IterationState s;
  s.gamma = gamma;
  s.y_in = truncate_below(y_in, gamma);
  s.noise = noise;
  s.T = T;
  return s;
}

IterationState iterate_stage(IterationState state, const InteractionParams& params,
                             const SchemeSpec& spec) {
  params.validate();
  spec.validate();
  const long steps = step_count(state.T, spec.dt);
  const std::size_t M = state.y_in.size();
  const long off = state.y_in.offset();
  const int stage = state.stage + 1;
  const PathBundle* prev = stage > 0 ? &state.paths.back() : nullptr;
  if (prev && static_cast<long>(prev->states.size()) != steps + 1) {
    fail(ErrorCode::Precondition, "previous stage is not on the current grid");
  }

  PathBundle out = empty_bundle(state, spec);
  std::vector<double> y(state.y_in.values().begin(), state.y_in.values().end());
  out.times.push_back(0.0);
  out.states.push_back(y);
  std::vector<double> dist;
  for (long n = 0; n < steps; ++n) {
    for (std::size_t k = 0; k < M; ++k) {
      const long key = off + static_cast<long>(k);
      if (!prev) {
        y[k] = step_bessel(y[k], params, spec, state.noise, key, n);
        continue;
      }
      distances(prev->states[static_cast<std::size_t>(n)], k, dist);
      const double beta = params.beta;
      OneDForce force = [&](double v) { return -beta * kernel::psi_from_distances(v, dist); };
      y[k] = step_oneD(y[k], force, params, spec, state.noise, key, n);
    }
    out.times.push_back(static_cast<double>(n + 1) * spec.dt);
    out.states.push_back(y);
  }
  state.paths.push_back(std::move(out));
  state.stage = stage;
  return state;
}

double path_sup_diff(const PathBundle& a, const PathBundle& b) {
  double best = 0.0;
  for (std::size_t t = 0; t < std::min(a.states.size(), b.states.size()); ++t) {
    for (std::size_t k = 0; k < std::min(a.states[t].size(), b.states[t].size()); ++k) {
      best = std::max(best, std::abs(a.states[t][k] - b.states[t][k]));
    }
  }
  return best;
}

double path_max_excess(const PathBundle& a, const PathBundle& b) {
  double best = 0.0;
  for (std::size_t t = 0; t < std::min(a.states.size(), b.states.size()); ++t) {
    for (std::size_t k = 0; k < std::min(a.states[t].size(), b.states[t].size()); ++k) {
      best = std::max(best, a.states[t][k] - b.states[t][k]);
    }
  }
  return best;
}

DecreasingReport check_decreasing(const IterationState& state, double tol) {
  if (state.paths.size() < 2) fail(ErrorCode::Precondition, "check_decreasing needs two stages");
  DecreasingReport r;
  const PathBundle& first = state.paths.front();
  for (std::size_t k = 0; k + 1 < state.paths.size(); ++k) {
    const PathBundle& a = state.paths[k];
    const PathBundle& b = state.paths[k + 1];
    if (a.seed != first.seed || b.seed != first.seed || a.stream != first.stream ||
        b.stream != first.stream || a.times != b.times || a.offset != b.offset) {
      r.coupled = false;
    }
    const double v = path_max_excess(b, a);
    r.pair_violation.push_back(v);
    r.stage_diffs.push_back(path_sup_diff(b, a));
    r.max_violation = std::max(r.max_violation, v);
  }
  r.pass = r.coupled && r.max_violation <= tol;
  return r;
}

IterationResult iterate_to_tolerance(const GapConfig& y_in, double gamma, int n_max, double eps,
                                     const InteractionParams& params, const SchemeSpec& spec,
                                     const NoiseSource& noise, double T,
                                     std::optional<double> tol_cmp) {
  if (n_max < 1) fail(ErrorCode::Precondition, "n_max must be >= 1");
  if (!(eps > 0.0)) fail(ErrorCode::Precondition, "eps must be positive");
  const double tol = tol_cmp.value_or(10.0 * spec.dt);
  IterationState s = iterate_stage(start_iteration(y_in, gamma, noise, T), params, spec);
  IterationResult r;
  for (int n = 1; n <= n_max; ++n) {
    s = iterate_stage(std::move(s), params, spec);
    const PathBundle& cur = s.paths.back();
    const PathBundle& prev = s.paths[s.paths.size() - 2];
    const double excess = path_max_excess(cur, prev);
    if (excess > tol) {
      std::ostringstream os;
      os << "stage " << n << " exceeds stage " << n - 1 << " by " << excess << " > " << tol;
      fail(ErrorCode::InvariantViolation, os.str());
    }
    r.diffs.push_back(path_sup_diff(cur, prev));
    r.n_used = n;
    s.paths.erase(s.paths.begin());
    if (r.diffs.back() <= eps) {
      r.converged = true;
      break;
    }
  }
  r.path = std::move(s.paths.back());
  return r;
}

std::vector<double> gamma_ladder(int K) {
  std::vector<double> g;
  for (int k = 1; k <= K; ++k) g.push_back(std::ldexp(1.0, -k));
  return g;
}

}  // namespace dysonflow
