#include "dysonflow/sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dysonflow/error.hpp"

namespace dysonflow {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw DysonError(code, msg); }

enum class Outcome { Ok, BelowFloor, Invalid };

Outcome classify(std::span<const double> gaps, double floor) {
  Outcome r = Outcome::Ok;
  for (double g : gaps) {
    if (!std::isfinite(g) || !(g > 0.0)) return Outcome::Invalid;
    if (g < floor) r = Outcome::BelowFloor;
  }
  return r;
}

double tamed(double drift, double h) { return h * drift / (1.0 + h * std::abs(drift)); }

std::string stability_message(long n, int level, double min_gap) {
  std::ostringstream os;
  os << "step " << n << ": positivity lost after " << level
     << " refinements (smallest gap " << min_gap << ")";
  return os.str();
}

// Drives the refinement recursion shared by every stepper.  `attempt` maps
// (state, h, level, piece) to a candidate and the gaps to test.
template <class State, class Attempt>
void refine(State& state, const SchemeSpec& spec, long n, int level, std::uint64_t piece,
            Attempt&& attempt) {
  const double h = std::ldexp(spec.dt, -level);
  State cand;
  std::vector<double> gaps;
  attempt(state, h, level, piece, cand, gaps);
  const Outcome r = classify(gaps, spec.substep_floor);
  if (r == Outcome::Ok) {
    state = std::move(cand);
    return;
  }
  if (level >= spec.max_substep_depth) {
    if (r == Outcome::BelowFloor) {
      state = std::move(cand);
      return;
    }
    double mn = std::numeric_limits<double>::infinity();
    for (double g : gaps) mn = std::min(mn, g);
    fail(ErrorCode::Stability, stability_message(n, level, mn));
  }
  refine(state, spec, n, level + 1, 2 * piece, attempt);
  refine(state, spec, n, level + 1, 2 * piece + 1, attempt);
}

// Positions of a gap window anchored at 0.
void positions_from_gaps(std::span<const double> y, std::vector<double>& x) {
  x.resize(y.size() + 1);
  x[0] = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) x[k + 1] = x[k] + y[k];
}

}  // namespace

const char* to_string(Scheme s) {
  return s == Scheme::ImplicitSplitting ? "implicit-repulsion-splitting" : "tamed-explicit";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "implicit-repulsion-splitting") return Scheme::ImplicitSplitting;
  if (s == "tamed-explicit") return Scheme::TamedExplicit;
  fail(ErrorCode::InvalidConfig, "unknown scheme '" + s + "'");
}

void SchemeSpec::validate() const {
  std::ostringstream os;
  if (!(dt > 0.0) || !std::isfinite(dt)) os << " dt must be positive;";
  if (!(substep_floor >= 0.0)) os << " substep_floor must be >= 0;";
  if (max_substep_depth < 0) os << " max_substep_depth must be >= 0;";
  if (!os.str().empty()) fail(ErrorCode::InvalidConfig, "scheme:" + os.str());
}

double repulsion_root(double b, double c) {
  const double disc = std::sqrt(b * b + 4.0 * c);
  if (b >= 0.0) return 0.5 * (b + disc);
  return 2.0 * c / (disc - b);
}

ParticleConfig step_particles(const ParticleConfig& x, const InteractionParams& params,
                              const SchemeSpec& spec, const NoiseSource& noise, long n) {
  const long off = x.offset();
  const std::size_t N = x.size();
  const std::size_t anchor = static_cast<std::size_t>(x.contains(0) ? -off : 0);
  const double beta = params.beta;
  std::vector<double> db(N), psi(N > 0 ? N - 1 : 0);

  auto attempt = [&](const std::vector<double>& cur, double h, int level, std::uint64_t piece,
                     std::vector<double>& out, std::vector<double>& gaps) {
    for (std::size_t i = 0; i < N; ++i) {
      db[i] = noise.particle_increment(off + static_cast<long>(i), n, spec.dt, level, piece);
    }
    out.resize(N);
    gaps.resize(N > 0 ? N - 1 : 0);
    if (spec.scheme == Scheme::TamedExplicit) {
      for (std::size_t i = 0; i < N; ++i) {
        out[i] = cur[i] + db[i] + tamed(beta * kernel::phi(cur, i), h);
      }
      for (std::size_t k = 0; k + 1 < N; ++k) gaps[k] = out[k + 1] - out[k];
      return;
    }
    kernel::psi_all(cur, psi);
    for (std::size_t k = 0; k + 1 < N; ++k) {
      const double b = (cur[k + 1] - cur[k]) + (db[k + 1] - db[k]) - beta * h * psi[k];
      gaps[k] = repulsion_root(b, beta * h);
    }
    out[anchor] = cur[anchor] + db[anchor] + beta * h * kernel::phi(cur, anchor);
    for (std::size_t i = anchor + 1; i < N; ++i) out[i] = out[i - 1] + gaps[i - 1];
    for (std::size_t i = anchor; i-- > 0;) out[i] = out[i + 1] - gaps[i];
  };

  std::vector<double> state(x.positions().begin(), x.positions().end());
  refine(state, spec, n, 0, 0, attempt);
  return ParticleConfig(off, std::move(state));
}

namespace {

void gap_step(std::vector<double>& y, long off, std::span<const double> z_ext,
              const InteractionParams& params, const SchemeSpec& spec, const NoiseSource& noise,
              long n) {
  const std::size_t M = y.size();
  const double beta = params.beta;
  std::vector<double> x, psi(M);

  auto attempt = [&](const std::vector<double>& cur, double h, int level, std::uint64_t piece,
                     std::vector<double>& out, std::vector<double>& gaps) {
    positions_from_gaps(cur, x);
    kernel::psi_all(x, psi);
    out.resize(M);
    for (std::size_t k = 0; k < M; ++k) {
      const double dw = noise.gap_increment(off + static_cast<long>(k), n, spec.dt, level, piece);
      const double z = z_ext.empty() ? 0.0 : z_ext[k];
      if (spec.scheme == Scheme::TamedExplicit) {
        const double drift = beta * (1.0 / cur[k] - psi[k] + cur[k] * z);
        out[k] = cur[k] + dw + tamed(drift, h);
      } else {
        const double b = cur[k] + dw + beta * h * (cur[k] * z - psi[k]);
        out[k] = repulsion_root(b, beta * h);
      }
    }
    gaps = out;
  };
  refine(y, spec, n, 0, 0, attempt);
}

}  // namespace

GapConfig step_gaps(const GapConfig& y, std::span<const double> z_ext,
                    const InteractionParams& params, const SchemeSpec& spec,
                    const NoiseSource& noise, long n) {
  if (!y.all_finite()) fail(ErrorCode::InvalidConfig, "step_gaps needs finite gaps");
  if (!z_ext.empty() && z_ext.size() != y.size()) {
    fail(ErrorCode::InvalidConfig, "external force size does not match gap window");
  }
  std::vector<double> state(y.values().begin(), y.values().end());
  gap_step(state, y.offset(), z_ext, params, spec, noise, n);
  return GapConfig(y.offset(), std::move(state));
}

double step_oneD(double y, const OneDForce& force, const InteractionParams& params,
                 const SchemeSpec& spec, const NoiseSource& noise, long key, long n) {
  if (!(y >= 0.0) || !std::isfinite(y)) fail(ErrorCode::InvalidConfig, "step_oneD needs y >= 0");
  const double beta = params.beta;
  auto attempt = [&](const double& cur, double h, int level, std::uint64_t piece, double& out,
                     std::vector<double>& gaps) {
    const double dw = noise.gap_increment(key, n, spec.dt, level, piece);
    const double f = force ? force(cur) : 0.0;
    if (spec.scheme == Scheme::TamedExplicit && cur > 0.0) {
      out = cur + dw + tamed(beta / cur + f, h);
    } else {
      out = repulsion_root(cur + dw + h * f, beta * h);
    }
    gaps.assign(1, out);
  };
  refine(y, spec, n, 0, 0, attempt);
  return y;
}

double step_bessel(double q, const InteractionParams& params, const SchemeSpec& spec,
                   const NoiseSource& noise, long key, long n) {
  return step_oneD(q, OneDForce{}, params, spec, noise, key, n);
}

long step_count(double T, double dt) {
  if (!(T >= 0.0) || !(dt > 0.0)) fail(ErrorCode::InvalidConfig, "need T >= 0 and dt > 0");
  const double r = T / dt;
  const long m = std::lround(r);
  if (std::abs(r - static_cast<double>(m)) > 1e-6 * std::max(1.0, r)) {
    fail(ErrorCode::InvalidConfig, "T must be an integer multiple of dt");
  }
  return m;
}

namespace {

[[noreturn]] void rethrow_with_step(const DysonError& e, long n, double t) {
  std::ostringstream os;
  os << e.what() << " [step " << n << ", t = " << t << "]";
  throw DysonError(e.code(), os.str());
}

void record(PathBundle& out, std::vector<double> state, double t) {
  out.times.push_back(t);
  out.states.push_back(std::move(state));
}

}  // namespace

PathBundle simulate_particles(const ParticleConfig& x0, const InteractionParams& params,
                              const SchemeSpec& spec, const NoiseSource& noise, double T,
                              long record_every) {
  params.validate();
  spec.validate();
  if (record_every < 1) fail(ErrorCode::InvalidConfig, "record_every must be >= 1");
  const long steps = step_count(T, spec.dt);
  PathBundle out;
  out.kind = PathBundle::Kind::Particles;
  out.offset = x0.offset();
  out.seed = noise.seed();
  out.stream = noise.stream();
  out.dt = spec.dt;
  out.record_every = record_every;
  ParticleConfig x = x0;
  record(out, {x.positions().begin(), x.positions().end()}, 0.0);
  for (long n = 0; n < steps; ++n) {
    try {
      x = step_particles(x, params, spec, noise, n);
    } catch (const DysonError& e) {
      rethrow_with_step(e, n, static_cast<double>(n) * spec.dt);
    }
    if ((n + 1) % record_every == 0 || n + 1 == steps) {
      record(out, {x.positions().begin(), x.positions().end()}, static_cast<double>(n + 1) * spec.dt);
    }
  }
  return out;
}

PathBundle simulate_gaps(const GapConfig& y0, const ExternalField& field,
                         const InteractionParams& params, const SchemeSpec& spec,
                         const NoiseSource& noise, double T, long record_every) {
  params.validate();
  spec.validate();
  if (record_every < 1) fail(ErrorCode::InvalidConfig, "record_every must be >= 1");
  if (!y0.all_finite()) fail(ErrorCode::InvalidConfig, "simulate_gaps needs finite gaps");
  const long steps = step_count(T, spec.dt);
  PathBundle out;
  out.kind = PathBundle::Kind::Gaps;
  out.offset = y0.offset();
  out.seed = noise.seed();
  out.stream = noise.stream();
  out.dt = spec.dt;
  out.record_every = record_every;
  std::vector<double> y(y0.values().begin(), y0.values().end());
  std::vector<double> z(field ? y.size() : 0);
  record(out, y, 0.0);
  for (long n = 0; n < steps; ++n) {
    try {
      if (field) field(n, z);
      gap_step(y, y0.offset(), z, params, spec, noise, n);
    } catch (const DysonError& e) {
      rethrow_with_step(e, n, static_cast<double>(n) * spec.dt);
    }
    if ((n + 1) % record_every == 0 || n + 1 == steps) {
      record(out, y, static_cast<double>(n + 1) * spec.dt);
    }
  }
  return out;
}

std::vector<double> simulate_bessel(double q0, const InteractionParams& params,
                                    const SchemeSpec& spec, const NoiseSource& noise, long key,
                                    long steps) {
  std::vector<double> path;
  path.reserve(static_cast<std::size_t>(steps) + 1);
  path.push_back(q0);
  double q = q0;
  for (long n = 0; n < steps; ++n) {
    q = step_bessel(q, params, spec, noise, key, n);
    path.push_back(q);
  }
  return path;
}

}  // namespace dysonflow
