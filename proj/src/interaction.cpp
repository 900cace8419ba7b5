#include "dysonflow/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dysonflow/error.hpp"
#include "dysonflow/kahan.hpp"

namespace dysonflow {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw DysonError(code, msg); }

double inverse_difference(double xi, double xj) {
  const double d = xi - xj;
  if (d == 0.0) fail(ErrorCode::CoincidentParticles, "coincident particles in interaction sum");
  return 1.0 / d;
}

// yval / (z (yval + z)), with the limits for infinite arguments.
double compression_term(double yval, double z) {
  if (std::isinf(z)) return 0.0;
  if (std::isinf(yval)) return 1.0 / z;
  return yval / (z * (yval + z));
}

}  // namespace

void InteractionParams::validate() const {
  std::ostringstream os;
  if (!(beta >= 1.0)) os << " beta must be >= 1;";
  if (truncation_k < 1) os << " truncation_k must be >= 1;";
  if (!(tail_tol > 0.0)) os << " tail_tol must be positive;";
  if (!os.str().empty()) fail(ErrorCode::Precondition, "interaction parameters:" + os.str());
}

PhiResult phi_sym_detail(const ParticleConfig& x, long i, long k) {
  if (!x.contains(i)) fail(ErrorCode::OutOfWindow, "phi_sym: index outside window");
  const long reach = std::max(i - x.offset(), x.last_index() - i);
  PhiResult r;
  r.clipped = k > std::min(i - x.offset(), x.last_index() - i);
  r.radius = std::min(k, reach);
  KahanSum sum;
  const double xi = x[i];
  for (long d = 1; d <= r.radius; ++d) {
    double ring = 0.0;
    if (x.contains(i - d)) ring += inverse_difference(xi, x[i - d]);
    if (x.contains(i + d)) ring += inverse_difference(xi, x[i + d]);
    sum.add(ring);
    if (d == r.radius) r.last_ring = 0.5 * std::abs(ring);
  }
  r.value = 0.5 * sum.value();
  return r;
}

double phi_sym(const ParticleConfig& x, long i, long k) { return phi_sym_detail(x, i, k).value; }

double psi_a(double yval, const GapConfig& y, long key, IndexRange window) {
  if (yval == 0.0) return 0.0;
  KahanSum sum;
  // particles to the right of a + 1/2: i >= key + 2
  double z = 0.0;
  for (long i = key + 2; i <= window.last; ++i) {
    z += y.at(i - 1);
    sum.add(compression_term(yval, z));
    if (std::isinf(z)) break;
  }
  // particles to the left of a - 1/2: i <= key - 1
  z = 0.0;
  for (long i = key - 1; i >= window.first; --i) {
    z += y.at(i);
    sum.add(compression_term(yval, z));
    if (std::isinf(z)) break;
  }
  return 0.5 * sum.value();
}

double psi_a(double yval, const GapConfig& y, long key) {
  return psi_a(yval, y, key, y.particle_window());
}

double eta_a(const GapConfig& y, long key, IndexRange window) {
  const double ya = y.at(key);
  if (ya == 0.0) fail(ErrorCode::SingularDrift, "eta_a at a zero gap");
  return 1.0 / ya - psi_a(ya, y, key, window);
}

double eta_a(const GapConfig& y, long key) { return eta_a(y, key, y.particle_window()); }

double eta_lw_external(double z, const GapConfig& y, long i1, long i2, IndexRange window) {
  if (z == 0.0) return 0.0;
  const long lo = std::min(i1, i2);
  const long hi = std::max(i1, i2);
  KahanSum sum;
  double w = 0.0;
  for (long ip = hi + 1; ip <= window.last; ++ip) {
    w += y.at(ip - 1);
    if (std::isinf(w)) break;
    sum.add(z / (2.0 * (z + w) * w));
  }
  w = 0.0;
  for (long ip = lo - 1; ip >= window.first; --ip) {
    w += y.at(ip);
    if (std::isinf(w)) break;
    sum.add(z / (2.0 * (z + w) * w));
  }
  return sum.value();
}

EtaWindowSum eta_window_sum(const GapConfig& y, long i1, long i2, IndexRange window) {
  if (!window.contains(i1) || !window.contains(i2)) {
    fail(ErrorCode::OutOfWindow, "eta_window_sum: interval end outside window");
  }
  const long lo = std::min(i1, i2);
  const long hi = std::max(i1, i2);
  EtaWindowSum r;

  KahanSum lhs;
  for (long k = lo; k < hi; ++k) lhs.add(eta_a(y, k, window));
  r.lhs = lhs.value();

  KahanSum up;
  double z = 0.0;
  for (long i = lo + 1; i <= hi; ++i) {
    z += y.at(i - 1);
    up.add(1.0 / (2.0 * z));
  }
  z = 0.0;
  for (long i = hi - 1; i >= lo; --i) {
    z += y.at(i);
    up.add(1.0 / (2.0 * z));
  }
  r.up = up.value();

  double inner = 0.0;
  for (long k = lo; k < hi; ++k) inner += y.at(k);
  r.lw = eta_lw_external(inner, y, lo, hi, window);
  return r;
}

namespace kernel {

double phi(std::span<const double> x, std::size_t i) {
  const std::size_t n = x.size();
  const std::size_t reach = std::max(i, n - 1 - i);
  KahanSum sum;
  const double xi = x[i];
  for (std::size_t d = 1; d <= reach; ++d) {
    double ring = 0.0;
    if (d <= i) ring += 1.0 / (xi - x[i - d]);
    if (i + d < n) ring += 1.0 / (xi - x[i + d]);
    sum.add(ring);
  }
  return 0.5 * sum.value();
}

void psi_all(std::span<const double> x, std::span<double> out) {
  const std::size_t n = x.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double lo = x[k];
    const double hi = x[k + 1];
    const double y = hi - lo;
    KahanSum right;
    for (std::size_t i = k + 2; i < n; ++i) right.add(y / ((x[i] - hi) * (x[i] - lo)));
    KahanSum left;
    for (std::size_t i = k; i-- > 0;) left.add(y / ((lo - x[i]) * (hi - x[i])));
    out[k] = 0.5 * (right.value() + left.value());
  }
}

double psi_from_distances(double yval, std::span<const double> distances) {
  if (yval == 0.0) return 0.0;
  KahanSum sum;
  for (double z : distances) sum.add(compression_term(yval, z));
  return 0.5 * sum.value();
}

}  // namespace kernel

}  // namespace dysonflow
