#pragma once

// Independent references: eigenvalues of matrix-valued Brownian motions,
// running maxima of Bessel processes and a bulk-GUE point sample standing in
// for the sine process.

#include <cstdint>
#include <functional>
#include <vector>

#include "dysonflow/configspace.hpp"
#include "dysonflow/interaction.hpp"
#include "dysonflow/noise.hpp"

namespace dysonflow {

struct MatrixEnsembleSpec {
  int beta = 2;  // 1: real symmetric, 2: complex Hermitian
  int N = 8;
  double dt = 1e-3;
  double T = 0.5;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  long record_every = 1;
  std::vector<double> initial;  // H(0) = diag(initial); empty means H(0) = 0

  void validate() const;
};

struct EigenTrajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> eigenvalues;  // increasing per time
  double max_residual = 0.0;  // max ||Hv - lambda v|| / ||H|| at the final time
};

// H(t + dt) = H(t) + dH with independent Gaussian entries: diagonal variance
// dt, off-diagonal E|dH_ij|^2 = dt (beta = 2) or dt / 2 (beta = 1).  The
// eigenvalues then follow the particle system with the same beta.
EigenTrajectory matrix_dbm_sample(const MatrixEnsembleSpec& spec);

struct BesselMoment {
  double t = 0.0;
  double p = 1.0;
  double estimate = 0.0;
  double ci_half = 0.0;  // 1.96 standard errors
  long samples = 0;
};

struct BesselMomentSpec {
  double beta = 1.0;
  long samples = 100000;
  long steps = 1000;  // grid resolution of [0, t]
  double substep_floor = 1e-4;  // in units of sqrt(t)
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

// Monte Carlo mean of (sup_[0,t] Q)^p for the Bessel process Q = W + int beta/Q
// started at 0, W a gap noise of variance 2t.  Sample s is driven by the gap
// stream 2s, so samples are independent and the same for every t.  Grid and
// floor scale with t, so every horizon is resolved alike.
BesselMoment q_estimate(double t, double p, const BesselMomentSpec& spec);

struct TauSolution {
  double tau = 0.0;
  BesselMoment at_tau;
  double residual = 0.0;  // |q(tau, 1) - target|
  int iterations = 0;
};

// Geometric bisection on t for q(t, 1) = target, stopping once the residual
// is within the confidence half-width.
TauSolution solve_tau(double target, const BesselMomentSpec& spec, double t_lo = 1e-12,
                      double t_hi = 1.0, int max_iter = 80);

struct SineSampleSpec {
  int N = 1024;
  double window = 32.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// Unfolded bulk of a GUE spectrum (E|H_ij|^2 = 1): points u = N F(lambda /
// sqrt(N)) with F the semicircle distribution function, centred at N/2 and
// kept within [-window, window]; index 0 is the first point >= 0.  Throws
// Coverage when window > N / 16.
ParticleConfig sine_like_sample(const SineSampleSpec& spec);

// Semicircle distribution function on [-2, 2].
double semicircle_cdf(double s);

struct SineMembership {
  double xsp = 0.0;  // sup_{1<=|r|<=R} |N([0,r]) - |r|| |r|^(alpha-1)
  double rsp = 0.0;  // sup_{0<|m|<=m_max} avg^p_(0,m)
};

// Requires alpha < 1/2 (Precondition otherwise).  R = m_max as a distance.
SineMembership membership_stats_sine(const ParticleConfig& sample, const SpaceParams& params,
                                     long m_max);

// Number of points in the closed interval [lo, hi].
long count_in(const ParticleConfig& x, double lo, double hi);

}  // namespace dysonflow
