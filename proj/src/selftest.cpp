#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dysonflow/cli.hpp"
#include "dysonflow/error.hpp"
#include "dysonflow/interaction.hpp"
#include "dysonflow/kahan.hpp"

namespace dysonflow {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

long pick(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

// Gap window of 1..max_gaps gaps whose particle window contains 0.
GapConfig random_gaps(Rng& rng, long max_gaps) {
  const long M = pick(rng, 1, max_gaps);
  const long offset = pick(rng, -M, 0);
  std::vector<double> g(static_cast<std::size_t>(M));
  for (double& v : g) v = std::exp(uniform(rng, std::log(0.05), std::log(5.0)));
  return GapConfig(offset, std::move(g));
}

SuiteResult roundtrip_suite(const SelftestOptions& o) {
  SuiteResult r{"roundtrip", true, 0, 0.0, ""};
  Rng rng(o.seed);
  for (int c = 0; c < o.cases; ++c, ++r.cases) {
    const long N = pick(rng, 1, 20);
    const long offset = pick(rng, -(N - 1), 0);
    std::vector<double> x(static_cast<std::size_t>(N));
    double pos = static_cast<double>(pick(rng, -256, 256)) / 64.0;
    for (double& v : x) {
      v = pos;
      pos += static_cast<double>(pick(rng, 1, 256)) / 64.0;
    }
    const ParticleConfig cfg(offset, x);
    if (!(from_gaps(to_gaps(cfg)) == cfg)) {
      r.pass = false;
      r.worst += 1.0;
    }
  }
  return r;
}

SuiteResult phif_suite(const SelftestOptions& o) {
  SuiteResult r{"phifS", true, 0, 0.0, ""};
  Rng rng(o.seed + 1);
  for (int c = 0; c < o.cases; ++c) {
    const GapConfig y = random_gaps(rng, 19);
    const ParticleConfig x = from_gaps({0.0, y});
    const IndexRange w = y.particle_window();
    for (long a = y.keys().first; a <= y.keys().last; ++a, ++r.cases) {
      const double psi = o.psi(y[a], y, a, w);
      const double eta = 1.0 / y[a] - psi;
      const double diff = phi_sym(x, a + 1, w.size()) - phi_sym(x, a, w.size());
      const double scale = 1.0 / y[a] + std::abs(psi);
      r.worst = std::max(r.worst, std::abs(eta - diff) / scale);
    }
  }
  r.pass = r.worst <= 1e-12;
  return r;
}

SuiteResult resum_suite(const SelftestOptions& o) {
  SuiteResult r{"resum1", true, 0, 0.0, ""};
  Rng rng(o.seed + 2);
  for (int c = 0; c < o.cases; ++c, ++r.cases) {
    const GapConfig y = random_gaps(rng, 20);
    const IndexRange w = y.particle_window();
    const long i1 = pick(rng, w.first, w.last - 1);
    const long i2 = pick(rng, i1 + 1, w.last);
    const EtaWindowSum s = eta_window_sum(y, i1, i2, w);
    KahanSum lhs;
    for (long a = i1; a < i2; ++a) lhs.add(1.0 / y[a] - o.psi(y[a], y, a, w));
    r.worst = std::max(r.worst, std::abs(lhs.value() - (s.up - s.lw)) / (s.up + s.lw));
  }
  r.pass = r.worst <= 1e-12;
  return r;
}

SuiteResult goodset_suite(const SelftestOptions& o) {
  SuiteResult r{"goodset", true, 0, 0.0, ""};
  Rng rng(o.seed + 3);
  long held = 0;
  for (int c = 0; c < 10 * o.cases; ++c, ++r.cases) {
    const long M = pick(rng, 2, 40);
    std::vector<double> g(static_cast<std::size_t>(M));
    const double gamma = static_cast<double>(pick(rng, 4, 16)) / 8.0;
    for (double& v : g) v = static_cast<double>(pick(rng, 1, 40)) / 8.0;
    const GapConfig y(0, g);
    const bool mirror = pick(rng, 0, 1) == 1;
    long i1 = pick(rng, 0, M - 1);
    long i2 = pick(rng, i1 + 1, M);
    long i3 = pick(rng, i2, M);
    if (mirror) {
      i1 = M - i1;
      i2 = M - i2;
      i3 = M - i3;
    }
    bool hypothesis = true;
    for (long i = i2;; i += (mirror ? -1 : 1)) {
      if (!(avg_between(y, i1, i) > gamma)) hypothesis = false;
      if (i == i3) break;
    }
    const auto found = goodset_find(y, i1, i2, i3, gamma);
    if (!hypothesis) {
      if (found) r.pass = false;
      continue;
    }
    ++held;
    if (!found || h_stat(y, *found, i3) < gamma) r.pass = false;
  }
  r.worst = static_cast<double>(held);
  std::ostringstream os;
  os << held << " cases satisfied the hypothesis";
  r.detail = os.str();
  return r;
}

SuiteResult topple_suite(const SelftestOptions& o) {
  SuiteResult r{"topple", true, 0, 0.0, ""};
  Rng rng(o.seed + 4);
  for (int c = 0; c < 10 * o.cases; ++c, ++r.cases) {
    const long W = pick(rng, 1, 200);
    const IndexRange window{-W / 2, W - W / 2};
    std::vector<long> A;
    const double density = uniform(rng, 0.0, 0.3);
    for (long k = window.first; k < window.last; ++k) {
      if (uniform(rng, 0.0, 1.0) < density) A.push_back(k);
    }
    const long n = pick(rng, 1, 6);
    for (Direction d : {Direction::Right, Direction::Left}) {
      try {
        const auto set = topple_set(A, n, d, window);
        if (static_cast<long>(set.size()) > n * static_cast<long>(A.size())) r.pass = false;
      } catch (const DysonError&) {
        r.pass = false;
      }
    }
  }
  return r;
}

}  // namespace

std::vector<SuiteResult> run_selftest(const SelftestOptions& options) {
  SelftestOptions o = options;
  if (!o.psi) {
    o.psi = [](double v, const GapConfig& y, long key, IndexRange w) { return psi_a(v, y, key, w); };
  }
  return {roundtrip_suite(o), phif_suite(o), resum_suite(o), goodset_suite(o), topple_suite(o)};
}

}  // namespace dysonflow
