#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>

#include "dysonflow/oracles.hpp"
#include "dysonflow/sde.hpp"
#include "dysonflow/stats.hpp"
#include "test_util.hpp"

using namespace dysonflow;
using testutil::error_of;

namespace {

double ks_one_sample(std::vector<double> v, const std::function<double(double)>& cdf) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    d = std::max({d, std::abs(static_cast<double>(i + 1) / n - f), std::abs(f - static_cast<double>(i) / n)});
  }
  return d;
}

// Squared gap over 2 dt after one step from H = 0.
std::vector<double> one_step_gaps(int beta, long samples) {
  std::vector<double> out;
  for (long s = 0; s < samples; ++s) {
    MatrixEnsembleSpec m;
    m.beta = beta;
    m.N = 2;
    m.dt = 0.01;
    m.T = 0.01;
    m.seed = 31;
    m.stream = static_cast<std::uint64_t>(s);
    const EigenTrajectory e = matrix_dbm_sample(m);
    const double g = e.eigenvalues.back()[1] - e.eigenvalues.back()[0];
    out.push_back(g * g / (2.0 * m.dt));
  }
  return out;
}

}  // namespace

TEST_CASE("matrix sampler at T = 0 returns the initial spectrum") {
  MatrixEnsembleSpec m;
  m.N = 4;
  m.T = 0.0;
  const EigenTrajectory zero = matrix_dbm_sample(m);
  REQUIRE(zero.eigenvalues.size() == 1);
  for (double l : zero.eigenvalues[0]) CHECK(l == 0.0);

  m.initial = {3.0, -1.0, 0.5, 2.0};
  const EigenTrajectory diag = matrix_dbm_sample(m);
  CHECK(diag.eigenvalues[0] == std::vector<double>{-1.0, 0.5, 2.0, 3.0});
}

TEST_CASE("matrix sampler validation") {
  MatrixEnsembleSpec m;
  m.beta = 4;
  CHECK(error_of([&] { matrix_dbm_sample(m); }) == ErrorCode::InvalidConfig);
  m = {};
  m.initial = {1.0};
  CHECK(error_of([&] { matrix_dbm_sample(m); }) == ErrorCode::InvalidConfig);
  m = {};
  m.T = 0.0105;
  CHECK(error_of([&] { matrix_dbm_sample(m); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("matrix sampler eigen residual and ordering") {
  for (int beta : {1, 2}) {
    MatrixEnsembleSpec m;
    m.beta = beta;
    m.N = 24;
    m.T = 0.2;
    m.dt = 1e-2;
    m.seed = 32;
    const EigenTrajectory e = matrix_dbm_sample(m);
    CHECK(e.times.size() == 21);
    CHECK(e.max_residual < 1e-12);
    for (const auto& l : e.eigenvalues) CHECK(std::is_sorted(l.begin(), l.end()));
  }
}

TEST_CASE("2x2 one-step gap law") {
  const std::vector<double> unitary = one_step_gaps(2, 5000);
  const double d2 = ks_one_sample(unitary, [](double x) {
    return std::erf(std::sqrt(x / 2.0)) - std::sqrt(2.0 * x / std::numbers::pi) * std::exp(-x / 2.0);
  });
  const std::vector<double> orthogonal = one_step_gaps(1, 5000);
  const double d1 = ks_one_sample(orthogonal, [](double x) { return 1.0 - std::exp(-x / 2.0); });
  std::printf("2x2 gap KS: beta 2 %.4f, beta 1 %.4f\n", d2, d1);
  CHECK(d2 < 0.03);
  CHECK(d1 < 0.03);
  // Swapping the laws must be detected.
  CHECK(ks_one_sample(orthogonal, [](double x) {
          return std::erf(std::sqrt(x / 2.0)) - std::sqrt(2.0 * x / std::numbers::pi) * std::exp(-x / 2.0);
        }) > 0.1);
}

TEST_CASE("q_estimate grows with t and vanishes at 0") {
  BesselMomentSpec spec;
  spec.samples = 2000;
  spec.steps = 200;
  spec.seed = 33;
  double prev = 0.0;
  for (double t : {1e-6, 1e-4, 1e-2, 1.0}) {
    const BesselMoment q = q_estimate(t, 1.0, spec);
    CHECK(q.samples == 2000);
    CHECK(q.estimate > prev);
    CHECK(q.ci_half < q.estimate);
    prev = q.estimate;
  }
  CHECK(q_estimate(1e-8, 1.0, spec).estimate < 1e-2);
  const BesselMoment a = q_estimate(0.5, 2.0, spec);
  const BesselMoment b = q_estimate(0.5, 1.0, spec);
  CHECK(a.estimate >= b.estimate * b.estimate);
}

TEST_CASE("running maximum of the Bessel process scales like sqrt(t)") {
  const long samples = 100000, steps = 100;
  InteractionParams params;
  params.beta = 1.0;
  auto sups = [&](double t, std::uint64_t seed) {
    SchemeSpec s;
    s.dt = t / static_cast<double>(steps);
    s.substep_floor = 1e-4 * std::sqrt(t);
    const NoiseSource noise(seed, 0);
    std::vector<double> out(static_cast<std::size_t>(samples));
    for (long k = 0; k < samples; ++k) {
      double q = 0.0, sup = 0.0;
      for (long n = 0; n < steps; ++n) {
        q = step_bessel(q, params, s, noise, 2 * k, n);
        sup = std::max(sup, q);
      }
      out[static_cast<std::size_t>(k)] = sup / std::sqrt(t);
    }
    return out;
  };
  const double d = ks_two_sample(sups(0.25, 34), sups(1.0, 35));
  std::printf("Bessel sup scaling KS: %.4f\n", d);
  CHECK(d <= 0.02);
}

TEST_CASE("solve_tau") {
  BesselMomentSpec spec;
  spec.samples = 4000;
  spec.steps = 200;
  spec.seed = 36;
  const TauSolution s = solve_tau(0.3, spec);
  CHECK(s.residual <= s.at_tau.ci_half);
  CHECK(s.tau > 0.0);
  CHECK(s.at_tau.t == s.tau);
  const double q = q_estimate(s.tau, 1.0, spec).estimate;
  CHECK(std::abs(q - 0.3) <= s.at_tau.ci_half);
}

TEST_CASE("semicircle_cdf") {
  CHECK(semicircle_cdf(-3.0) == 0.0);
  CHECK(semicircle_cdf(-2.0) == 0.0);
  CHECK(semicircle_cdf(0.0) == doctest::Approx(0.5));
  CHECK(semicircle_cdf(2.0) == doctest::Approx(1.0));
  CHECK(semicircle_cdf(5.0) == 1.0);
  // Density 1/pi at the origin.
  CHECK((semicircle_cdf(1e-4) - semicircle_cdf(-1e-4)) / 2e-4 == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-6));
  CHECK(semicircle_cdf(1.0) - semicircle_cdf(-1.0) == doctest::Approx(1.0 / 3.0 + std::sqrt(3.0) / (2.0 * std::numbers::pi)));
}

TEST_CASE("sine-like sampler") {
  SineSampleSpec bad;
  bad.N = 256;
  bad.window = 17.0;
  CHECK(error_of([&] { sine_like_sample(bad); }) == ErrorCode::Coverage);

  const int reps = 64;
  const std::vector<double> L{1.0, 2.0, 4.0, 8.0, 16.0};
  std::vector<std::vector<double>> counts(L.size());
  std::vector<double> density, exp_moment;
  for (int r = 0; r < reps; ++r) {
    SineSampleSpec s;
    s.N = 256;
    s.window = 16.0;
    s.seed = 37;
    s.stream = static_cast<std::uint64_t>(r);
    const ParticleConfig x = sine_like_sample(s);
    REQUIRE(x.at(0) >= 0.0);
    REQUIRE(x.at(-1) < 0.0);
    CHECK(x.positions().front() >= -16.0);
    CHECK(x.positions().back() <= 16.0);
    density.push_back(static_cast<double>(count_in(x, -12.0, 12.0)) / 24.0);
    for (std::size_t k = 0; k < L.size(); ++k) {
      counts[k].push_back(static_cast<double>(count_in(x, -L[k] / 2.0, L[k] / 2.0)));
    }
    exp_moment.push_back(std::exp(x.at(0) - x.at(-1)));
  }
  const double rho = mean(density);
  std::printf("sine-like density %.4f\n", rho);
  CHECK(std::abs(rho - 1.0) < 0.05);

  std::vector<double> var;
  for (const auto& c : counts) var.push_back(variance(c));
  const double slope = loglog_slope(L, var);
  std::printf("number variance:");
  for (double v : var) std::printf(" %.3f", v);
  std::printf("  log-log slope %.3f\n", slope);
  CHECK(slope < 0.5);
  CHECK(var.back() < 0.5 * L.back());

  const double em = mean(exp_moment);
  std::printf("E exp(gap at 0) %.3f\n", em);
  CHECK(em < 20.0);
}

TEST_CASE("count_in and sine membership statistics") {
  const ParticleConfig lat = ParticleConfig::lattice(-40, 40);
  CHECK(count_in(lat, 0.0, 3.0) == 4);
  CHECK(count_in(lat, 0.5, 2.5) == 2);
  CHECK(count_in(lat, 3.0, 0.0) == 0);

  SpaceParams p;
  p.alpha = 0.3;
  p.rho = 1.0;
  const SineMembership m = membership_stats_sine(lat, p, 32);
  CHECK(m.xsp <= 1.0);
  CHECK(m.xsp > 0.0);
  CHECK(m.rsp == 1.0);

  p.alpha = 0.5;
  CHECK(error_of([&] { membership_stats_sine(lat, p, 32); }) == ErrorCode::Precondition);
  p.alpha = 0.3;
  CHECK(error_of([&] { membership_stats_sine(lat, p, 0); }) == ErrorCode::Precondition);
}
