#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "dysonflow/convergence.hpp"
#include "dysonflow/iteration.hpp"
#include "test_util.hpp"

using namespace dysonflow;
using testutil::error_of;

namespace {

SchemeSpec spec_dt(double dt) {
  SchemeSpec s;
  s.dt = dt;
  return s;
}

InteractionParams beta_of(double beta) {
  InteractionParams p;
  p.beta = beta;
  return p;
}

PathBundle constant_gap_path(long offset, std::size_t width, double value, std::size_t times) {
  PathBundle p;
  p.kind = PathBundle::Kind::Gaps;
  p.offset = offset;
  for (std::size_t t = 0; t < times; ++t) {
    p.times.push_back(0.01 * static_cast<double>(t));
    p.states.emplace_back(width, value);
  }
  return p;
}

}  // namespace

TEST_CASE("windows on the lattice") {
  const WindowLadder l = make_windows(ParticleConfig::lattice(-40, 40), {4, 8, 16, 32});
  for (std::size_t k = 0; k < l.n_values.size(); ++k) {
    CHECK(l.windows[k] == IndexRange{-l.n_values[k] + 1, l.n_values[k] - 1});
  }
  CHECK(is_nested(l));
  CHECK(error_of([] { make_windows(ParticleConfig::lattice(-10, 10), {11}); }) == ErrorCode::WindowExhausted);
  CHECK(error_of([] { make_windows(ParticleConfig::lattice(-10, 10), {0}); }) == ErrorCode::Precondition);
}

TEST_CASE("windows on 2Z") {
  const ParticleConfig x = ParticleConfig::lattice(-30, 30, 2.0);
  for (long n = 1; n <= 50; ++n) {
    const WindowLadder l = make_windows(x, {n});
    long hi = -1000, lo = 1000;
    for (long i = -30; i <= 30; ++i) {
      if (2.0 * static_cast<double>(i) < static_cast<double>(n)) hi = std::max(hi, i);
      if (2.0 * static_cast<double>(i) > -static_cast<double>(n)) lo = std::min(lo, i);
    }
    CHECK(l.windows[0].last == hi);
    CHECK(l.windows[0].first == lo);
    CHECK(hi == (n + 1) / 2 - 1);
  }
}

TEST_CASE("windows on random configurations are nested") {
  testutil::Rng rng(3);
  for (int c = 0; c < 50; ++c) {
    std::vector<double> pos;
    double p = -80.0;
    while (p < 80.0) {
      pos.push_back(p);
      p += testutil::uniform(rng, 0.1, 2.0);
    }
    const ParticleConfig x(-static_cast<long>(pos.size() / 2), pos);
    CHECK(is_nested(make_windows(x, {2, 5, 9, 20, 40, 70})));
  }
  const ParticleConfig lat = ParticleConfig::lattice(-5, 5);
  CHECK(restrict_to(lat, {-2, 3}) == ParticleConfig(-2, {-2, -1, 0, 1, 2, 3}));
  CHECK(error_of([&] { restrict_to(lat, {-6, 0}); }) == ErrorCode::OutOfWindow);
}

TEST_CASE("coupled errors") {
  const ParticleConfig x = ParticleConfig::lattice(-20, 20);
  const WindowLadder l = make_windows(x, {4, 8, 16});
  const CoupledErrors e = coupled_errors(x, l, beta_of(2), spec_dt(1e-3), 0.1, 0, 2.0, {5, 6, 2});
  CHECK(e.rows.size() == 18);
  for (const auto& row : e.rows) {
    if (row.n == 16) CHECK(row.sup_error == 0.0);
    CHECK(row.power_error == doctest::Approx(row.sup_error * row.sup_error));
  }
  REQUIRE(e.summary.size() == 3);
  CHECK(e.summary[0].median_sup > e.summary[1].median_sup);
  CHECK(e.summary[0].replicas == 6);

  const CoupledErrors again = coupled_errors(x, l, beta_of(2), spec_dt(1e-3), 0.1, 0, 2.0, {5, 6, 1});
  for (std::size_t k = 0; k < e.rows.size(); ++k) CHECK(e.rows[k].sup_error == again.rows[k].sup_error);

  const CoupledErrors edge = coupled_errors(x, l, beta_of(2), spec_dt(1e-3), 0.05, 5, 2.0, {5, 2, 1});
  CHECK_FALSE(edge.rows[0].applicable);
  CHECK(edge.summary[0].replicas == 0);
  CHECK(error_of([&] { coupled_errors(x, l, beta_of(2), spec_dt(1e-3), 0.1, 40, 2.0, {5, 1, 1}); }) ==
        ErrorCode::OutOfWindow);
}

TEST_CASE("larger windows compress gaps") {
  const ParticleConfig x = ParticleConfig::lattice(-20, 20);
  for (std::uint64_t r = 0; r < 5; ++r) {
    const NoiseSource noise(8, r);
    const PathBundle small = simulate_particles(restrict_to(x, {-4, 4}), beta_of(2), spec_dt(1e-3), noise, 0.3);
    const PathBundle large = simulate_particles(restrict_to(x, {-12, 12}), beta_of(2), spec_dt(1e-3), noise, 0.3);
    CHECK(nested_gap_excess(small, large) <= 1e-2);
  }
}

TEST_CASE("correlation counts") {
  const PathBundle p = simulate_particles(ParticleConfig::lattice(-10, 10), beta_of(2), spec_dt(1e-3),
                                          NoiseSource(1, 0), 0.1);
  CHECK(correlation_count(p, {{100.0, 101.0, 0.05}}) == 0.0);
  CHECK(correlation_count(p, {{-2.5, 2.5, 0.0}}) == 5.0);
  CHECK(correlation_count(p, {{-2.5, 2.5, 0.0}, {-0.5, 1.5, 0.0}}) == 10.0);
  CHECK(correlation_count(p, {}) == 1.0);

  const ParticleConfig x = ParticleConfig::lattice(-20, 20);
  const auto rows = correlation_experiment(x, make_windows(x, {4, 8, 16}), beta_of(2), spec_dt(1e-3), 0.1,
                                           {{-1.5, 1.5, 0.1}}, {2, 20, 2});
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.replicas == 20);
    std::printf("correlation n = %ld: %.3f\n", r.n, r.mean);
    CHECK(r.mean > 1.0);
    CHECK(r.mean < 5.0);
  }
}

TEST_CASE("boundary interactions") {
  const std::vector<double> y{1.0, 0.5, 2.0, 1.5, 0.7, 1.1};
  const BoundaryInteraction same = boundary_interaction(y, y, -3, 0, +1, 1);
  CHECK(same.full == 0.0);

  std::vector<double> up = y;
  for (double& v : up) v += 0.25;
  for (int sign : {+1, -1}) {
    const BoundaryInteraction b = boundary_interaction(up, y, -3, 0, sign, 1);
    CHECK(b.full > 0.0);
    CHECK(b.full == doctest::Approx(b.near + b.far));
  }
  // L^+_0 by hand: j = 1, 2, 3 with cut at 3.
  double expect = 0.0, yu = 0.0, yl = 0.0;
  for (std::size_t k = 3; k < 6; ++k) {
    yu += up[k];
    yl += y[k];
    expect += 0.5 * (1.0 / yl - 1.0 / yu);
  }
  const BoundaryInteraction b = boundary_interaction(up, y, -3, 0, +1, 1);
  CHECK(b.full == doctest::Approx(expect));
  CHECK(b.far == 0.0);
  CHECK(error_of([&] { boundary_interaction(up, y, -3, 5, +1, 1); }) == ErrorCode::OutOfWindow);
}

TEST_CASE("uniqueness diagnostics") {
  const GapConfig lat(-6, std::vector<double>(12, 1.0));
  std::vector<double> shifted(12, 1.25);
  const NoiseSource noise(13, 0);
  const PathBundle lw = simulate_gaps(lat, {}, beta_of(2), spec_dt(1e-3), noise, 0.2);
  const PathBundle up = simulate_gaps(GapConfig(-6, shifted), {}, beta_of(2), spec_dt(1e-3), noise, 0.2);

  const DiagnosticSeries same = uniqueness_diagnostics(lw, lw, -2, 2, 1);
  for (std::size_t t = 0; t < same.times.size(); ++t) {
    CHECK(same.E[t] == 0.0);
    CHECK(same.at_i1.plus[t].full == 0.0);
    CHECK(same.at_i2.minus[t].full == 0.0);
  }

  const DiagnosticSeries s = uniqueness_diagnostics(up, lw, -2, 2, 1);
  CHECK(s.E.front() == doctest::Approx(1.0));
  for (double e : s.E) CHECK(e >= -1e-2);
  const double res = balance_residual(s, 2.0);
  std::printf("E/L balance residual %.3e\n", res);

  double prev = INFINITY;
  for (double dt : {2e-3, 1e-3, 5e-4}) {
    const PathBundle l0 = simulate_gaps(lat, {}, beta_of(2), spec_dt(dt), NoiseSource::silent(), 0.2);
    const PathBundle u0 = simulate_gaps(GapConfig(-6, shifted), {}, beta_of(2), spec_dt(dt), NoiseSource::silent(), 0.2);
    const double r0 = balance_residual(uniqueness_diagnostics(u0, l0, -2, 2, 1), 2.0);
    std::printf("noiseless balance residual dt %.0e: %.3e\n", dt, r0);
    CHECK(r0 < 0.6 * prev);
    prev = r0;
  }

  CHECK(error_of([&] { uniqueness_diagnostics(up, lw, 2, -2, 1); }) == ErrorCode::Precondition);
}

TEST_CASE("diagnostics on ordered limits of the gamma ladder") {
  testutil::Rng rng(14);
  std::vector<double> g(12);
  for (double& v : g) v = testutil::uniform(rng, 0.1, 1.5);
  const GapConfig y(-6, g);
  const NoiseSource noise(15, 0);
  const PathBundle up = iterate_to_tolerance(y, 0.5, 10, 1e-5, beta_of(1), spec_dt(1e-3), noise, 0.1).path;
  const PathBundle lw = iterate_to_tolerance(y, 0.25, 10, 1e-5, beta_of(1), spec_dt(1e-3), noise, 0.1).path;
  const DiagnosticSeries s = uniqueness_diagnostics(up, lw, -3, 3, 1);
  for (double e : s.E) CHECK(e >= -1e-2);
}

TEST_CASE("spacing conservation") {
  const NoiseSource noise(16, 0);
  const PathBundle p = simulate_particles(ParticleConfig::lattice(-40, 40), beta_of(2), spec_dt(1e-3), noise, 0.2);
  const SpacingTable t0 = spacing_conservation(p, {2, 4, 8, 16}, 0, 1.0);
  for (const auto& row : t0.rows) CHECK(row.deviation == 0.0);
  const SpacingTable t1 = spacing_conservation(p, {2, 4, 8, 16}, p.times.size() - 1, 1.0);
  CHECK(t1.rows.size() == 4);
  CHECK(t1.fitted_exponent < 0.0);
  for (long m : {2L, 8L, 16L}) {
    const double res = spacing_balance_residual(p, m, noise, beta_of(2));
    std::printf("spacing balance residual m = %ld: %.3e\n", m, res);
    CHECK(res <= 5e-3);
  }
  CHECK(error_of([&] { spacing_conservation(p, {41}, 0, 1.0); }) == ErrorCode::OutOfWindow);
}

TEST_CASE("mesoscopic partition") {
  CHECK(partition_point(2.0, 0.5) == 4);
  CHECK(partition_point(-2.0, 0.5) == -4);
  CHECK(partition_point(0.0, 0.3) == 0);
  CHECK(partition_point(1.5, 1.0 / 3.0) == 3);

  const auto cells = partition_cells(0.5, 1.0, {-16, 15});
  REQUIRE(cells.size() == 8);
  CHECK(cells.front().keys == IndexRange{-16, -10});
  CHECK(cells[4].keys == IndexRange{0, 0});
  CHECK(cells.back().keys == IndexRange{9, 15});
  long covered = 0;
  for (const auto& c : cells) covered += c.keys.size();
  CHECK(covered == 32);

  for (double alpha : {0.3, 0.4, 0.5, 0.7, 0.9}) {
    for (double k : {1.0, 2.0, 5.0}) {
      const long reach = partition_point(10.0 * k, alpha);
      if (reach > 2000000) continue;
      CHECK(max_neighbor_ratio(partition_cells(alpha, k, {-reach, reach - 1})) <= 16.0);
    }
  }
  CHECK(error_of([] { partition_cells(0.9, 0.1, {-10, 10}); }) == ErrorCode::DegeneratePartition);
  CHECK(error_of([] { partition_cells(1.2, 1.0, {-10, 10}); }) == ErrorCode::Precondition);
}

TEST_CASE("density partition check") {
  const PathBundle flat = constant_gap_path(-50, 100, 1.0, 5);
  const DensityReport r = density_partition_check(flat, 0.5, 2.0, 1.0);
  CHECK(r.min_average == 1.0);
  CHECK(r.pass);
  CHECK(r.cells > 0);

  PathBundle dip = flat;
  dip.states[3][50] = 0.01;
  const DensityReport d = density_partition_check(dip, 0.5, 1.0, 1.0);
  CHECK(d.min_average == doctest::Approx(0.01));
  CHECK(d.worst_time == 3);
  CHECK_FALSE(d.pass);
  CHECK(density_partition_check(dip, 0.5, 2.0, 1.0).pass);
}
