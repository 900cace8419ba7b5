#pragma once

// Positivity-preserving integrators for the finite particle system, the gap
// system with external forces, the one-dimensional gap equation and the
// Bessel process.  All of them draw their increments from a NoiseSource.
//
// Implicit splitting: per step, b = y + dW + dt * (non-singular drift), then
// the repulsion beta/y is integrated implicitly through the positive root of
// y^2 - b y - beta dt = 0.  Steps whose smallest gap falls below the floor are
// redone as two half steps with Brownian-bridge refined noise.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dysonflow/configspace.hpp"
#include "dysonflow/interaction.hpp"
#include "dysonflow/noise.hpp"

namespace dysonflow {

enum class Scheme { ImplicitSplitting, TamedExplicit };

const char* to_string(Scheme s);
// Accepts "implicit-repulsion-splitting" and "tamed-explicit".
Scheme scheme_from_string(const std::string& s);

struct SchemeSpec {
  double dt = 1e-3;
  Scheme scheme = Scheme::ImplicitSplitting;
  double substep_floor = 1e-4;
  int max_substep_depth = 12;

  // Throws InvalidConfig on dt <= 0, floor < 0 or negative depth.
  void validate() const;
};

// Positive root of q^2 - b q - c = 0 for c > 0, cancellation-free for b < 0.
double repulsion_root(double b, double c);

// One step (index n) of X_i += dB_i + beta phi_i(X) dt over the full window.
ParticleConfig step_particles(const ParticleConfig& x, const InteractionParams& params,
                              const SchemeSpec& spec, const NoiseSource& noise, long n);

// One step of Y_a += dW_a + beta (eta_a(Y) + Y_a Z*_a) dt over the window of y.
// z_ext is either empty (no external force) or has one entry per gap.
GapConfig step_gaps(const GapConfig& y, std::span<const double> z_ext,
                    const InteractionParams& params, const SchemeSpec& spec,
                    const NoiseSource& noise, long n);

// Force F(y) of the one-dimensional equation, frozen at the step's left time.
using OneDForce = std::function<double(double)>;

// One step of Y += dW_key + (beta / Y + F(Y)) dt.
double step_oneD(double y, const OneDForce& force, const InteractionParams& params,
                 const SchemeSpec& spec, const NoiseSource& noise, long key, long n);

// One step of Q += dW_key + beta / Q dt; q may be 0.
double step_bessel(double q, const InteractionParams& params, const SchemeSpec& spec,
                   const NoiseSource& noise, long key, long n);

struct PathBundle {
  enum class Kind { Particles, Gaps };

  Kind kind = Kind::Particles;
  long offset = 0;  // first particle index or first gap key
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double dt = 0.0;
  long record_every = 1;

  std::size_t width() const { return states.empty() ? 0 : states.front().size(); }
  IndexRange indices() const {
    return {offset, offset + static_cast<long>(width()) - 1};
  }
  double value(std::size_t t, long index) const {
    return states[t][static_cast<std::size_t>(index - offset)];
  }
  ParticleConfig particles(std::size_t t) const { return ParticleConfig(offset, states[t]); }
  GapConfig gaps(std::size_t t) const { return GapConfig(offset, states[t]); }
};

// Number of steps n with n dt = T; throws InvalidConfig unless T is a
// multiple of dt.
long step_count(double T, double dt);

// External force on the gap window at step n (time n dt): fills one entry per gap.
using ExternalField = std::function<void(long n, std::span<double> out)>;

PathBundle simulate_particles(const ParticleConfig& x0, const InteractionParams& params,
                              const SchemeSpec& spec, const NoiseSource& noise, double T,
                              long record_every = 1);

PathBundle simulate_gaps(const GapConfig& y0, const ExternalField& field,
                         const InteractionParams& params, const SchemeSpec& spec,
                         const NoiseSource& noise, double T, long record_every = 1);

// Bessel path Q^{0}_key started at q0 (usually 0), every step recorded.
std::vector<double> simulate_bessel(double q0, const InteractionParams& params,
                                    const SchemeSpec& spec, const NoiseSource& noise, long key,
                                    long steps);

}  // namespace dysonflow
