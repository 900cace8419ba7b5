#include "dysonflow/oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "dysonflow/error.hpp"
#include "dysonflow/kahan.hpp"
#include "dysonflow/parallel.hpp"
#include "dysonflow/sde.hpp"

namespace dysonflow {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw DysonError(code, msg); }

using Hermitian = Eigen::MatrixXcd;

std::vector<double> sorted_eigenvalues(const Hermitian& H) {
  Eigen::SelfAdjointEigenSolver<Hermitian> es(H, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end());
  return ev;
}

double eigen_residual(const Hermitian& H) {
  Eigen::SelfAdjointEigenSolver<Hermitian> es(H);
  const double norm = std::max(H.norm(), std::numeric_limits<double>::min());
  const Hermitian R = H * es.eigenvectors() - es.eigenvectors() * es.eigenvalues().asDiagonal();
  double worst = 0.0;
  for (Eigen::Index c = 0; c < R.cols(); ++c) worst = std::max(worst, R.col(c).norm());
  return worst / norm;
}

}  // namespace

void MatrixEnsembleSpec::validate() const {
  std::ostringstream os;
  if (beta != 1 && beta != 2) os << " beta must be 1 or 2;";
  if (N < 1) os << " N must be >= 1;";
  if (!(dt > 0.0)) os << " dt must be positive;";
  if (!(T >= 0.0)) os << " T must be >= 0;";
  if (record_every < 1) os << " record_every must be >= 1;";
  if (!initial.empty() && static_cast<int>(initial.size()) != N) os << " initial spectrum needs N values;";
  if (!os.str().empty()) fail(ErrorCode::InvalidConfig, "matrix ensemble:" + os.str());
}

EigenTrajectory matrix_dbm_sample(const MatrixEnsembleSpec& spec) {
  spec.validate();
  const long steps = step_count(spec.T, spec.dt);
  const int N = spec.N;
  const NoiseSource noise(spec.seed, spec.stream);
  Hermitian H = Hermitian::Zero(N, N);
  for (int i = 0; i < static_cast<int>(spec.initial.size()); ++i) H(i, i) = spec.initial[static_cast<std::size_t>(i)];

  EigenTrajectory out;
  out.times.push_back(0.0);
  out.eigenvalues.push_back(sorted_eigenvalues(H));
  const double sd = std::sqrt(spec.dt);
  const double sd_off = std::sqrt(spec.dt / 2.0);
  for (long n = 0; n < steps; ++n) {
    for (int i = 0; i < N; ++i) {
      H(i, i) += sd * noise.normal(NoiseDomain::Matrix, static_cast<long>(i) * N + i, n);
      for (int j = i + 1; j < N; ++j) {
        const long e = static_cast<long>(i) * N + j;
        const double re = sd_off * noise.normal(NoiseDomain::Matrix, e, n, 0, 0);
        const double im = spec.beta == 2 ? sd_off * noise.normal(NoiseDomain::Matrix, e, n, 0, 1) : 0.0;
        H(i, j) += std::complex<double>(re, im);
        H(j, i) = std::conj(H(i, j));
      }
    }
    if ((n + 1) % spec.record_every == 0 || n + 1 == steps) {
      out.times.push_back(static_cast<double>(n + 1) * spec.dt);
      out.eigenvalues.push_back(sorted_eigenvalues(H));
    }
  }
  out.max_residual = eigen_residual(H);
  return out;
}

BesselMoment q_estimate(double t, double p, const BesselMomentSpec& spec) {
  if (!(t > 0.0)) fail(ErrorCode::Precondition, "q_estimate needs t > 0");
  if (spec.samples < 2 || spec.steps < 1) fail(ErrorCode::Precondition, "q_estimate needs samples >= 2");
  InteractionParams params;
  params.beta = spec.beta;
  SchemeSpec scheme;
  scheme.dt = t / static_cast<double>(spec.steps);
  scheme.substep_floor = spec.substep_floor * std::sqrt(t);
  const NoiseSource noise(spec.seed);
  std::vector<double> values(static_cast<std::size_t>(spec.samples));
  parallel_for(values.size(), spec.threads, [&](std::size_t s) {
    const long key = 2 * static_cast<long>(s);
    double q = 0.0, sup = 0.0;
    for (long n = 0; n < spec.steps; ++n) {
      q = step_bessel(q, params, scheme, noise, key, n);
      sup = std::max(sup, q);
    }
    values[s] = std::pow(sup, p);
  });
  KahanSum sum, sq;
  for (double v : values) sum.add(v);
  const double n = static_cast<double>(values.size());
  const double m = sum.value() / n;
  for (double v : values) sq.add((v - m) * (v - m));
  BesselMoment r;
  r.t = t;
  r.p = p;
  r.estimate = m;
  r.ci_half = 1.96 * std::sqrt(sq.value() / (n - 1.0) / n);
  r.samples = spec.samples;
  return r;
}

TauSolution solve_tau(double target, const BesselMomentSpec& spec, double t_lo, double t_hi,
                      int max_iter) {
  if (!(target > 0.0) || !(t_lo > 0.0) || !(t_hi > t_lo)) {
    fail(ErrorCode::Precondition, "solve_tau needs target > 0 and 0 < t_lo < t_hi");
  }
  TauSolution sol;
  for (int it = 1; it <= max_iter; ++it) {
    const double mid = std::sqrt(t_lo * t_hi);
    const BesselMoment q = q_estimate(mid, 1.0, spec);
    sol.tau = mid;
    sol.at_tau = q;
    sol.residual = std::abs(q.estimate - target);
    sol.iterations = it;
    if (sol.residual <= q.ci_half) break;
    (q.estimate < target ? t_lo : t_hi) = mid;
  }
  return sol;
}

double semicircle_cdf(double s) {
  s = std::clamp(s, -2.0, 2.0);
  return 0.5 + s * std::sqrt(4.0 - s * s) / (4.0 * std::numbers::pi) + std::asin(s / 2.0) / std::numbers::pi;
}

ParticleConfig sine_like_sample(const SineSampleSpec& spec) {
  if (spec.N < 2 || !(spec.window > 0.0)) fail(ErrorCode::Precondition, "sampler needs N >= 2 and window > 0");
  if (spec.window > static_cast<double>(spec.N) / 16.0) {
    std::ostringstream os;
    os << "window " << spec.window << " exceeds N/16 = " << spec.N / 16.0;
    fail(ErrorCode::Coverage, os.str());
  }
  const int N = spec.N;
  const NoiseSource noise(spec.seed, spec.stream);
  Hermitian H(N, N);
  const double s2 = std::sqrt(0.5);
  for (int i = 0; i < N; ++i) {
    H(i, i) = noise.normal(NoiseDomain::Sampler, static_cast<long>(i) * N + i, 0);
    for (int j = i + 1; j < N; ++j) {
      const long e = static_cast<long>(i) * N + j;
      H(i, j) = std::complex<double>(s2 * noise.normal(NoiseDomain::Sampler, e, 0, 0, 0),
                                     s2 * noise.normal(NoiseDomain::Sampler, e, 0, 0, 1));
      H(j, i) = std::conj(H(i, j));
    }
  }
  const std::vector<double> ev = sorted_eigenvalues(H);
  const double rootN = std::sqrt(static_cast<double>(N));
  const double centre = static_cast<double>(N) / 2.0;
  std::vector<double> kept;
  long negatives = 0;
  for (double lambda : ev) {
    const double u = static_cast<double>(N) * semicircle_cdf(lambda / rootN) - centre;
    if (u < -spec.window || u > spec.window) continue;
    if (!kept.empty() && !(u > kept.back())) continue;
    kept.push_back(u);
    if (u < 0.0) ++negatives;
  }
  return ParticleConfig(-negatives, std::move(kept));
}

long count_in(const ParticleConfig& x, double lo, double hi) {
  if (hi < lo) return 0;
  const auto p = x.positions();
  return std::upper_bound(p.begin(), p.end(), hi) - std::lower_bound(p.begin(), p.end(), lo);
}

SineMembership membership_stats_sine(const ParticleConfig& sample, const SpaceParams& params,
                                     long m_max) {
  if (!(params.alpha > 0.0 && params.alpha < 0.5)) {
    fail(ErrorCode::Precondition, "sine membership statistics need alpha in (0, 1/2)");
  }
  if (m_max < 1) fail(ErrorCode::Precondition, "m_max must be >= 1");
  const double R = static_cast<double>(m_max);
  const auto p = sample.positions();
  SineMembership out;
  auto consider = [&](double r, long count) {
    const double a = std::abs(r);
    out.xsp = std::max(out.xsp, std::abs(static_cast<double>(count) - a) * std::pow(a, params.alpha - 1.0));
  };
  for (double r : {1.0, R}) {
    consider(r, count_in(sample, 0.0, r));
    consider(-r, count_in(sample, -r, 0.0));
  }
  for (double x : p) {
    const double a = std::abs(x);
    if (a < 1.0 || a > R) continue;
    const long closed = x > 0 ? count_in(sample, 0.0, x) : count_in(sample, x, 0.0);
    consider(x, closed);
    consider(x, closed - 1);
  }
  const AnchoredGapConfig g = to_gaps(sample);
  out.rsp = membership_report(g.gaps, params, m_max).sup_avg_p;
  return out;
}

}  // namespace dysonflow
