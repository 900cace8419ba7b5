#pragma once

// Drift functionals of the particle and gap systems.
//
// A "window" argument is always a range of particle indices; the gap-side
// functionals restricted to a window are exactly the differences of the
// particle interaction computed over that same window.

#include <span>
#include <vector>

#include "dysonflow/configspace.hpp"

namespace dysonflow {

struct InteractionParams {
  double beta = 2.0;
  long truncation_k = 1L << 20;  // symmetric truncation radius for phi
  double tail_tol = 1e-3;

  // Throws Precondition unless beta >= 1 and truncation_k >= 1.
  void validate() const;
};

struct PhiResult {
  double value = 0.0;
  double last_ring = 0.0;  // magnitude of the outermost paired ring, a remainder estimate
  long radius = 0;         // radius actually summed
  bool clipped = false;    // true when the requested radius ran past the window
};

// (1/2) sum_{0<|j-i|<=k} 1/(x_i - x_j), accumulated ring by ring (j = i-d
// paired with j = i+d) with compensated summation.  A radius beyond the window
// is clipped, which yields the full-window interaction.
PhiResult phi_sym_detail(const ParticleConfig& x, long i, long k);
double phi_sym(const ParticleConfig& x, long i, long k);

// Compression term psi_a(yval; y) restricted to particle indices in `window`:
// (1/2) sum_{i in window, |i-a|>1} yval / (z_(a,i) (yval + z_(a,i))),
// z_(a,i) the total gap strictly between a and i.  Zero for yval == 0;
// terms with an infinite z vanish.
double psi_a(double yval, const GapConfig& y, long key, IndexRange window);
double psi_a(double yval, const GapConfig& y, long key);

// eta_a = 1/y_a - psi_a(y_a; y) over `window`.
double eta_a(const GapConfig& y, long key, IndexRange window);
double eta_a(const GapConfig& y, long key);

struct EtaWindowSum {
  double lhs = 0.0;  // sum of eta_a over a in (i1, i2)
  double up = 0.0;
  double lw = 0.0;
};

// Both sides of the resummation sum_{a in (i1,i2)} eta_a = up - lw, every sum
// restricted to `window` (which must contain i1 and i2).
EtaWindowSum eta_window_sum(const GapConfig& y, long i1, long i2, IndexRange window);

// Outer-gap part of the resummation evaluated at an external mass z >= 0:
// sum over i' beyond the interval on either side of z / (2 (z + w) w), with w
// the gap total from the interval end to i'.
double eta_lw_external(double z, const GapConfig& y, long i1, long i2, IndexRange window);

// Raw-position kernels used by the integrators.  `x` holds a strictly
// increasing window; indices are local (0-based).
namespace kernel {

// Full-window phi for local particle i.
double phi(std::span<const double> x, std::size_t i);

// Full-window psi for every gap: out[k] = psi of gap (k, k+1) at its own value.
void psi_all(std::span<const double> x, std::span<double> out);

// psi for a trial value yval given the distances z_(a,i) of every contributing
// particle (already restricted to the window).
double psi_from_distances(double yval, std::span<const double> distances);

}  // namespace kernel

}  // namespace dysonflow
