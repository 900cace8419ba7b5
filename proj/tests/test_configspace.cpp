#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "dysonflow/configspace.hpp"
#include "oracles_bf.hpp"
#include "test_util.hpp"

using namespace dysonflow;
using testutil::error_of;
using testutil::pick;
using testutil::uniform;

TEST_CASE("particle configurations reject non-increasing positions") {
  CHECK(error_of([] { ParticleConfig(0, {0.0, 0.0}); }) == ErrorCode::InvalidConfig);
  CHECK(error_of([] { ParticleConfig(0, {1.0, std::nan("")}); }) == ErrorCode::InvalidConfig);
  CHECK(error_of([] { GapConfig(0, {1.0, 0.0}); }) == ErrorCode::InvalidConfig);
  CHECK(error_of([] { GapConfig(0, {1.0, INFINITY}); }) == ErrorCode::InvalidConfig);
  CHECK_FALSE(error_of([] { GapConfig(0, {1.0, INFINITY}, true); }));
  CHECK(ParticleConfig(0, {1.0}).at(0) == 1.0);
  CHECK(error_of([] { ParticleConfig(0, {1.0}).at(1); }) == ErrorCode::OutOfWindow);
}

TEST_CASE("gaps_between") {
  CHECK(gaps_between(0, 3) == IndexRange{0, 2});
  CHECK(gaps_between(3, 0) == IndexRange{0, 2});
  CHECK(gaps_between(2, 2).empty());
  CHECK(gaps_between(-2, -1) == IndexRange{-2, -2});
}

TEST_CASE("to_gaps") {
  const AnchoredGapConfig lat = to_gaps(ParticleConfig::lattice(-3, 3));
  CHECK(lat.x0 == 0.0);
  CHECK(lat.gaps.keys() == IndexRange{-3, 2});
  for (double g : lat.gaps.values()) CHECK(g == 1.0);

  const AnchoredGapConfig g = to_gaps(ParticleConfig(-1, {-1.0, 0.0, 2.0}));
  CHECK(g.x0 == 0.0);
  CHECK(g.gaps[-1] == 1.0);
  CHECK(g.gaps[0] == 2.0);

  CHECK(error_of([] { to_gaps(ParticleConfig(1, {0.0, 1.0})); }) == ErrorCode::AnchorMissing);
}

TEST_CASE("from_gaps") {
  const ParticleConfig lat = from_gaps({0.0, GapConfig(-2, {1.0, 1.0, 1.0, 1.0})});
  CHECK(lat == ParticleConfig::lattice(-2, 2));

  const ParticleConfig x = from_gaps({5.0, GapConfig(-1, {2.0, 2.0})});
  CHECK(x == ParticleConfig(-1, {3.0, 5.0, 7.0}));

  CHECK(error_of([] { from_gaps({0.0, GapConfig(0, {1.0, INFINITY}, true)}); }) == ErrorCode::NotInvertible);
  CHECK(error_of([] { from_gaps({0.0, GapConfig(2, {1.0})}); }) == ErrorCode::AnchorMissing);
}

TEST_CASE("round trip on random configurations") {
  testutil::Rng rng(1);
  for (int c = 0; c < 1000; ++c) {
    const long n = pick(rng, 1, 30);
    const long offset = -pick(rng, 0, n - 1);
    std::vector<double> x(static_cast<std::size_t>(n));
    double pos = uniform(rng, -10.0, 10.0);
    for (double& v : x) {
      v = pos;
      pos += std::ldexp(static_cast<double>(pick(rng, 1, 1024)), -8);
    }
    const ParticleConfig cfg(offset, x);
    CHECK(from_gaps(to_gaps(cfg)) == cfg);
  }
}

TEST_CASE("avg_power") {
  const GapConfig c(0, std::vector<double>(6, 1.5));
  CHECK(avg_power(c, {1, 4}) == 1.5);
  CHECK(avg_power(c, {3, 2}) == 0.0);
  CHECK(avg_power(GapConfig(0, {1.0, 2.0, 3.0}), {0, 2}, 2.0) == doctest::Approx(14.0 / 3.0));
  CHECK(avg_between(GapConfig(0, {1.0, 2.0, 3.0}), 3, 0) == 2.0);
  CHECK(std::isinf(avg_power(GapConfig(0, {1.0, INFINITY}, true), {0, 1})));
  CHECK(error_of([&] { avg_power(c, {0, 6}); }) == ErrorCode::OutOfWindow);
}

TEST_CASE("alpha_norm") {
  SpaceParams p;
  p.rho = 2.0;
  p.alpha = 0.3;
  CHECK(alpha_norm(GapConfig(-8, std::vector<double>(16, 2.0)), p, 8) == 0.0);

  std::vector<double> g(16, 2.0);
  g[8] = 3.0;  // key 0
  CHECK(alpha_norm(GapConfig(-8, g), p, 8) == doctest::Approx(1.0));

  // Brute force over both directions.
  testutil::Rng rng(2);
  for (int c = 0; c < 200; ++c) {
    const long m_max = pick(rng, 1, 12);
    std::vector<double> v(static_cast<std::size_t>(2 * m_max));
    for (double& e : v) e = uniform(rng, 0.2, 3.0);
    double expect = 0.0;
    for (long m = -m_max; m <= m_max; ++m) {
      if (m == 0) continue;
      const double avg = static_cast<double>(bf::average(v, -m_max, 0, m));
      expect = std::max(expect, std::abs(avg - p.rho) * std::pow(std::abs(m), p.alpha));
    }
    CHECK(alpha_norm(GapConfig(-m_max, v), p, m_max) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("membership_report") {
  SpaceParams p;
  p.rho = 1.0;
  const MembershipReport lat = membership_report(GapConfig(-5, std::vector<double>(10, 1.0)), p, 5);
  CHECK(lat.alpha_norm == 0.0);
  CHECK(lat.sup_avg_p == 1.0);
  CHECK(lat.min_gap == 1.0);
  CHECK(lat.max_gap == 1.0);

  std::vector<double> g(12, 1.0);
  g.back() = INFINITY;
  const MembershipReport r = membership_report(GapConfig(-6, g, true), p, 5);
  CHECK(r.max_gap == 1.0);
  CHECK(std::isfinite(r.sup_avg_p));
}

TEST_CASE("SpaceParams::validate") {
  SpaceParams p;
  CHECK_NOTHROW(p.validate());
  p.alpha = 1.0;
  CHECK(error_of([&] { p.validate(); }) == ErrorCode::Precondition);
  p = {};
  p.p = 1.0;
  CHECK(error_of([&] { p.validate(); }) == ErrorCode::Precondition);
}

TEST_CASE("h_stat") {
  CHECK(h_stat(GapConfig(-4, std::vector<double>(8, 2.0)), -3, 4) == 2.0);
  CHECK(h_stat(GapConfig(0, {0.1, 5.0, 5.0}), 0, 3) == doctest::Approx(0.1));
  testutil::Rng rng(3);
  for (int c = 0; c < 1000; ++c) {
    const long M = pick(rng, 1, 40);
    std::vector<double> g(static_cast<std::size_t>(M));
    for (double& v : g) v = uniform(rng, 0.01, 4.0);
    const long i = pick(rng, 0, M);
    long j = pick(rng, 0, M);
    if (j == i) j = i == 0 ? M : 0;
    CHECK(h_stat(GapConfig(0, g), i, j) == doctest::Approx(bf::h_stat(g, 0, i, j)).epsilon(1e-13));
  }
}

TEST_CASE("g_freq") {
  const std::vector<long> none;
  CHECK(g_freq(none, 3, 10) == 0.0);
  const std::vector<long> right{5};
  CHECK(g_freq(right, 5, 12) == 1.0);
  const std::vector<long> left{4};
  CHECK(g_freq(left, 5, -3) == 1.0);
  CHECK(g_freq(right, 5, 5) == 0.0);

  testutil::Rng rng(4);
  for (int c = 0; c < 300; ++c) {
    const long W = pick(rng, 1, 200);
    std::vector<long> A;
    for (long k = 0; k < W; ++k) {
      if (uniform(rng, 0, 1) < 0.2) A.push_back(k);
    }
    const long i = pick(rng, 0, W);
    const long end = pick(rng, 0, 1) ? W : 0;
    double expect = 0.0;
    for (long j = i; j != end;) {
      j += end > i ? 1 : -1;
      long count = 0;
      for (long k : A) count += (k >= std::min(i, j) && k < std::max(i, j)) ? 1 : 0;
      expect = std::max(expect, static_cast<double>(count) / static_cast<double>(std::abs(j - i)));
    }
    CHECK(g_freq(A, i, end) == doctest::Approx(expect));
    const long n = pick(rng, 1, 6);
    CHECK(g_freq_exceeds(A, i, end, n) == (expect * static_cast<double>(n) > 1.0 + 1e-12));
  }
}

TEST_CASE("goodset_find") {
  const GapConfig two(0, std::vector<double>(20, 2.0));
  CHECK(goodset_find(two, 2, 6, 15, 1.0) == 2L);
  CHECK(goodset_find(two, 15, 6, 2, 1.0) == 15L);
  CHECK_FALSE(goodset_find(GapConfig(0, std::vector<double>(20, 0.5)), 2, 6, 15, 1.0));
  CHECK(error_of([&] { goodset_find(two, 6, 2, 15, 1.0); }) == ErrorCode::Precondition);

  // Counting function dips below the line at i = 3 and stays above after.
  const GapConfig dip(0, {2.0, 0.1, 0.1, 3.0, 3.0, 3.0, 3.0});
  const auto i_star = goodset_find(dip, 0, 5, 7, 1.0);
  REQUIRE(i_star);
  CHECK(*i_star == 3);
  CHECK(h_stat(dip, *i_star, 7) >= 1.0);

  testutil::Rng rng(5);
  int held = 0;
  for (int c = 0; c < 2000; ++c) {
    const long M = pick(rng, 2, 40);
    std::vector<double> g(static_cast<std::size_t>(M));
    for (double& v : g) v = static_cast<double>(pick(rng, 1, 24)) / 8.0;
    const long i1 = pick(rng, 0, M - 1), i2 = pick(rng, i1 + 1, M), i3 = pick(rng, i2, M);
    const auto got = goodset_find(GapConfig(0, g), i1, i2, i3, 1.0);
    CHECK(got == bf::goodset(g, 0, i1, i2, i3, 1.0));
    if (got) {
      ++held;
      CHECK(h_stat(GapConfig(0, g), *got, i3) >= 1.0);
    }
  }
  CHECK(held > 100);
}

TEST_CASE("topple_set") {
  const std::vector<long> one{4};
  CHECK(topple_set(one, 2, Direction::Right, {-10, 10}) == std::vector<long>{4});
  CHECK(topple_set(one, 2, Direction::Left, {-10, 10}) == std::vector<long>{5});
  CHECK(topple_set(std::vector<long>{}, 3, Direction::Right, {0, 10}).empty());
  CHECK(error_of([&] { topple_set(one, 0, Direction::Right, {0, 10}); }) == ErrorCode::Precondition);

  testutil::Rng rng(6);
  for (int c = 0; c < 500; ++c) {
    const long W = pick(rng, 1, 120);
    std::vector<long> A;
    for (long k = 0; k < W; ++k) {
      if (uniform(rng, 0, 1) < 0.25) A.push_back(k);
    }
    const long n = pick(rng, 1, 6);
    for (bool right : {true, false}) {
      const auto got = topple_set(A, n, right ? Direction::Right : Direction::Left, {0, W});
      CHECK(got == bf::topple(A, n, right, {0, W}));
      CHECK(static_cast<long>(got.size()) <= n * static_cast<long>(A.size()));
    }
  }
}
