#pragma once

// Finite-to-infinite harness: nested truncation windows driven by one noise
// source, error curves against the largest window, correlation counts, the
// boundary interactions E and L, spacing conservation and the mesoscopic
// density partition.

#include <cstdint>
#include <vector>

#include "dysonflow/configspace.hpp"
#include "dysonflow/interaction.hpp"
#include "dysonflow/noise.hpp"
#include "dysonflow/sde.hpp"

namespace dysonflow {

struct WindowLadder {
  std::vector<long> n_values;
  std::vector<IndexRange> windows;  // particle indices with x_in in (-n, n)
};

// i_n^+ = max{i : x_i < n}, i_n^- = min{i : x_i > -n}.  Throws
// WindowExhausted unless x_in reaches past both -n and n.
WindowLadder make_windows(const ParticleConfig& x_in, const std::vector<long>& n_values);
bool is_nested(const WindowLadder& ladder);

ParticleConfig restrict_to(const ParticleConfig& x, IndexRange window);

struct ReplicaPlan {
  std::uint64_t seed = 0;
  long replicas = 1;
  unsigned threads = 1;
};

struct CoupledErrorRow {
  long n = 0;
  long replica = 0;
  bool applicable = true;
  double sup_error = 0.0;    // sup over the grid of |X^n_i - X^ref_i|
  double power_error = 0.0;  // sup_error^p'
};

struct CoupledErrorSummary {
  long n = 0;
  long replicas = 0;
  double median_sup = 0.0;
  double mean_power = 0.0;
};

struct CoupledErrors {
  std::vector<CoupledErrorRow> rows;  // ordered by (replica, n)
  std::vector<CoupledErrorSummary> summary;
};

// Every replica r uses NoiseSource(plan.seed, r) for all windows; the last
// window of the ladder is the reference.
CoupledErrors coupled_errors(const ParticleConfig& x_in, const WindowLadder& ladder,
                             const InteractionParams& params, const SchemeSpec& spec, double T,
                             long tracked, double p_prime, const ReplicaPlan& plan);

// max over common gap keys and grid times of (gap in `large` - gap in `small`)^+
// for two particle paths on nested windows.
double nested_gap_excess(const PathBundle& small, const PathBundle& large);

struct OpenSet {
  double lo = 0.0;
  double hi = 0.0;
  double time = 0.0;  // snapped to the nearest recorded time
};

// prod_j |(lo_j, hi_j) ∩ {X_i(s_j)}|.
double correlation_count(const PathBundle& particles, const std::vector<OpenSet>& opens);

struct CorrelationRow {
  long n = 0;
  long replicas = 0;
  double mean = 0.0;
};

std::vector<CorrelationRow> correlation_experiment(const ParticleConfig& x_in,
                                                   const WindowLadder& ladder,
                                                   const InteractionParams& params,
                                                   const SchemeSpec& spec, double T,
                                                   const std::vector<OpenSet>& opens,
                                                   const ReplicaPlan& plan);

struct BoundaryInteraction {
  double full = 0.0;
  double near = 0.0;  // j up to +-3m
  double far = 0.0;   // j beyond +-3m
};

// L^+_i (sign > 0) or L^-_i (sign < 0) for two gap vectors on the same window
// starting at gap key `offset`.
BoundaryInteraction boundary_interaction(std::span<const double> up, std::span<const double> lw,
                                         long offset, long i, int sign, long m);

struct BoundarySeries {
  std::vector<BoundaryInteraction> plus, minus;
};

struct DiagnosticSeries {
  std::vector<double> times;
  std::vector<double> E;  // sum over (i1, i2) of Y^up - Y^lw
  BoundarySeries at_i1, at_i2;
};

DiagnosticSeries uniqueness_diagnostics(const PathBundle& up, const PathBundle& lw, long i1,
                                        long i2, long m);

// max over recorded times of |E(t) - E(0) - beta * int_0^t (L+_{i2} - L-_{i2}
// - L+_{i1} + L-_{i1}) ds| with trapezoid quadrature.
double balance_residual(const DiagnosticSeries& s, double beta);

struct SpacingRow {
  long m = 0;
  double deviation = 0.0;  // |avg_(-m,m)(Y(t)) - rho|
};

struct SpacingTable {
  std::vector<SpacingRow> rows;
  double fitted_exponent = 0.0;  // slope of log deviation against log m
};

SpacingTable spacing_conservation(const PathBundle& particles, const std::vector<long>& m_values,
                                  std::size_t time_index, double rho);

// max over recorded times of the gap between avg_(-m,m)(Y(t)) - avg_(-m,m)(Y(0))
// and (B_m - B_-m)(t) / (2m) + beta int_0^t (phi_m - phi_-m) / (2m) ds.
double spacing_balance_residual(const PathBundle& particles, long m, const NoiseSource& noise,
                                const InteractionParams& params);

// sign(x) floor(|x|^(1/alpha)).
long partition_point(double x, double alpha);

struct Cell {
  long j = 0;        // cell b = j + 1/2
  IndexRange keys;   // [m_{kj}, m_{k(j+1)} - 1]
};

// Cells lying entirely inside `keys`.  Throws DegeneratePartition if one of
// them is empty.
std::vector<Cell> partition_cells(double alpha, double k, IndexRange keys);

// max over neighbouring cells of |A_{b+-1}| / |A_b|.
double max_neighbor_ratio(const std::vector<Cell>& cells);

struct DensityReport {
  double min_average = 0.0;
  long worst_cell = 0;
  std::size_t worst_time = 0;
  std::size_t cells = 0;
  bool pass = false;  // min_average >= rho / 2
};

DensityReport density_partition_check(const PathBundle& gaps, double alpha, double k, double rho);

}  // namespace dysonflow
