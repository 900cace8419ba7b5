#include "dysonflow/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dysonflow/error.hpp"
#include "dysonflow/kahan.hpp"
#include "dysonflow/parallel.hpp"
#include "dysonflow/stats.hpp"

namespace dysonflow {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw DysonError(code, msg); }

std::vector<double> gaps_of(const std::vector<double>& x) {
  std::vector<double> g(x.size() > 0 ? x.size() - 1 : 0);
  for (std::size_t k = 0; k + 1 < x.size(); ++k) g[k] = x[k + 1] - x[k];
  return g;
}

std::size_t nearest_time(const PathBundle& p, double t) {
  const auto it = std::lower_bound(p.times.begin(), p.times.end(), t);
  if (it == p.times.begin()) return 0;
  if (it == p.times.end()) return p.times.size() - 1;
  const auto k = static_cast<std::size_t>(it - p.times.begin());
  return (p.times[k] - t) < (t - p.times[k - 1]) ? k : k - 1;
}

}  // namespace

WindowLadder make_windows(const ParticleConfig& x_in, const std::vector<long>& n_values) {
  WindowLadder ladder;
  for (long n : n_values) {
    if (n < 1) fail(ErrorCode::Precondition, "window radius must be >= 1");
    const double r = static_cast<double>(n);
    if (x_in.size() == 0 || !(x_in[x_in.last_index()] >= r) || !(x_in[x_in.offset()] <= -r)) {
      std::ostringstream os;
      os << "initial configuration does not reach past +-" << n;
      fail(ErrorCode::WindowExhausted, os.str());
    }
    long hi = x_in.offset(), lo = x_in.last_index();
    for (long i = x_in.offset(); i <= x_in.last_index(); ++i) {
      if (x_in[i] < r) hi = i;
    }
    for (long i = x_in.last_index(); i >= x_in.offset(); --i) {
      if (x_in[i] > -r) lo = i;
    }
    ladder.n_values.push_back(n);
    ladder.windows.push_back({lo, hi});
  }
  return ladder;
}

bool is_nested(const WindowLadder& ladder) {
  for (std::size_t k = 0; k + 1 < ladder.windows.size(); ++k) {
    if (ladder.n_values[k] <= ladder.n_values[k + 1] &&
        !ladder.windows[k + 1].contains(ladder.windows[k])) {
      return false;
    }
  }
  return true;
}

ParticleConfig restrict_to(const ParticleConfig& x, IndexRange window) {
  if (!x.indices().contains(window)) fail(ErrorCode::OutOfWindow, "restriction window not covered");
  std::vector<double> v;
  for (long i = window.first; i <= window.last; ++i) v.push_back(x[i]);
  return ParticleConfig(window.first, std::move(v));
}

CoupledErrors coupled_errors(const ParticleConfig& x_in, const WindowLadder& ladder,
                             const InteractionParams& params, const SchemeSpec& spec, double T,
                             long tracked, double p_prime, const ReplicaPlan& plan) {
  if (ladder.windows.empty()) fail(ErrorCode::Precondition, "empty window ladder");
  if (!(p_prime > 0.0)) fail(ErrorCode::Precondition, "p' must be positive");
  const std::size_t L = ladder.windows.size();
  const IndexRange ref_window = ladder.windows.back();
  if (!ref_window.contains(tracked)) {
    fail(ErrorCode::OutOfWindow, "tracked index outside the reference window");
  }
  const auto R = static_cast<std::size_t>(plan.replicas);
  std::vector<CoupledErrorRow> rows(R * L);

  parallel_for(R, plan.threads, [&](std::size_t r) {
    const NoiseSource noise(plan.seed, r);
    const PathBundle ref =
        simulate_particles(restrict_to(x_in, ref_window), params, spec, noise, T);
    for (std::size_t w = 0; w < L; ++w) {
      CoupledErrorRow& row = rows[r * L + w];
      row.n = ladder.n_values[w];
      row.replica = static_cast<long>(r);
      if (!ladder.windows[w].contains(tracked)) {
        row.applicable = false;
        continue;
      }
      double sup = 0.0;
      if (w + 1 < L) {
        const PathBundle p =
            simulate_particles(restrict_to(x_in, ladder.windows[w]), params, spec, noise, T);
        for (std::size_t t = 0; t < p.times.size(); ++t) {
          sup = std::max(sup, std::abs(p.value(t, tracked) - ref.value(t, tracked)));
        }
      }
      row.sup_error = sup;
      row.power_error = std::pow(sup, p_prime);
    }
  });

  CoupledErrors out;
  out.rows = std::move(rows);
  for (std::size_t w = 0; w < L; ++w) {
    std::vector<double> sups, powers;
    for (std::size_t r = 0; r < R; ++r) {
      const CoupledErrorRow& row = out.rows[r * L + w];
      if (!row.applicable) continue;
      sups.push_back(row.sup_error);
      powers.push_back(row.power_error);
    }
    CoupledErrorSummary s;
    s.n = ladder.n_values[w];
    s.replicas = static_cast<long>(sups.size());
    if (!sups.empty()) {
      s.median_sup = median(sups);
      s.mean_power = mean(powers);
    }
    out.summary.push_back(s);
  }
  return out;
}

double nested_gap_excess(const PathBundle& small, const PathBundle& large) {
  const IndexRange common{std::max(small.indices().first, large.indices().first),
                          std::min(small.indices().last, large.indices().last)};
  double best = 0.0;
  const std::size_t T = std::min(small.states.size(), large.states.size());
  for (std::size_t t = 0; t < T; ++t) {
    for (long k = common.first; k < common.last; ++k) {
      const double gs = small.value(t, k + 1) - small.value(t, k);
      const double gl = large.value(t, k + 1) - large.value(t, k);
      best = std::max(best, gl - gs);
    }
  }
  return best;
}

double correlation_count(const PathBundle& particles, const std::vector<OpenSet>& opens) {
  double prod = 1.0;
  for (const OpenSet& o : opens) {
    const auto& x = particles.states[nearest_time(particles, o.time)];
    const auto lo = std::upper_bound(x.begin(), x.end(), o.lo);
    const auto hi = std::lower_bound(x.begin(), x.end(), o.hi);
    prod *= static_cast<double>(std::max<long>(0, hi - lo));
  }
  return prod;
}

std::vector<CorrelationRow> correlation_experiment(const ParticleConfig& x_in,
                                                   const WindowLadder& ladder,
                                                   const InteractionParams& params,
                                                   const SchemeSpec& spec, double T,
                                                   const std::vector<OpenSet>& opens,
                                                   const ReplicaPlan& plan) {
  const std::size_t L = ladder.windows.size();
  const auto R = static_cast<std::size_t>(plan.replicas);
  std::vector<double> counts(R * L);
  parallel_for(R, plan.threads, [&](std::size_t r) {
    const NoiseSource noise(plan.seed, r);
    for (std::size_t w = 0; w < L; ++w) {
      const PathBundle p =
          simulate_particles(restrict_to(x_in, ladder.windows[w]), params, spec, noise, T);
      counts[r * L + w] = correlation_count(p, opens);
    }
  });
  std::vector<CorrelationRow> out;
  for (std::size_t w = 0; w < L; ++w) {
    KahanSum s;
    for (std::size_t r = 0; r < R; ++r) s.add(counts[r * L + w]);
    out.push_back({ladder.n_values[w], plan.replicas, s.value() / static_cast<double>(R)});
  }
  return out;
}

BoundaryInteraction boundary_interaction(std::span<const double> up, std::span<const double> lw,
                                         long offset, long i, int sign, long m) {
  const long first = offset;
  const long last = offset + static_cast<long>(up.size());
  if (i < first || i > last) fail(ErrorCode::OutOfWindow, "boundary index outside window");
  KahanSum full, near_sum, far_sum;
  double yu = 0.0, yl = 0.0;
  const long cut = sign > 0 ? 3 * m : -3 * m;
  if (sign > 0) {
    for (long j = i + 1; j <= last; ++j) {
      const auto k = static_cast<std::size_t>(j - 1 - offset);
      yu += up[k];
      yl += lw[k];
      const double term = 0.5 * (yu - yl) / (yu * yl);
      full.add(term);
      (j <= cut ? near_sum : far_sum).add(term);
    }
  } else {
    for (long j = i - 1; j >= first; --j) {
      const auto k = static_cast<std::size_t>(j - offset);
      yu += up[k];
      yl += lw[k];
      const double term = 0.5 * (yu - yl) / (yu * yl);
      full.add(term);
      (j >= cut ? near_sum : far_sum).add(term);
    }
  }
  return {full.value(), near_sum.value(), far_sum.value()};
}

DiagnosticSeries uniqueness_diagnostics(const PathBundle& up, const PathBundle& lw, long i1,
                                        long i2, long m) {
  if (up.kind != PathBundle::Kind::Gaps || lw.kind != PathBundle::Kind::Gaps) {
    fail(ErrorCode::Precondition, "uniqueness diagnostics need gap paths");
  }
  if (up.offset != lw.offset || up.width() != lw.width() || up.times != lw.times) {
    fail(ErrorCode::Precondition, "diagnostic inputs must share window and grid");
  }
  if (i1 >= i2) fail(ErrorCode::Precondition, "need i1 < i2");
  DiagnosticSeries s;
  s.times = up.times;
  for (std::size_t t = 0; t < up.times.size(); ++t) {
    KahanSum e;
    for (long k = i1; k < i2; ++k) e.add(up.value(t, k) - lw.value(t, k));
    s.E.push_back(e.value());
    const auto& u = up.states[t];
    const auto& l = lw.states[t];
    s.at_i1.plus.push_back(boundary_interaction(u, l, up.offset, i1, +1, m));
    s.at_i1.minus.push_back(boundary_interaction(u, l, up.offset, i1, -1, m));
    s.at_i2.plus.push_back(boundary_interaction(u, l, up.offset, i2, +1, m));
    s.at_i2.minus.push_back(boundary_interaction(u, l, up.offset, i2, -1, m));
  }
  return s;
}

double balance_residual(const DiagnosticSeries& s, double beta) {
  std::vector<double> f(s.times.size());
  for (std::size_t t = 0; t < f.size(); ++t) {
    f[t] = s.at_i2.plus[t].full - s.at_i2.minus[t].full - s.at_i1.plus[t].full +
           s.at_i1.minus[t].full;
  }
  double integral = 0.0, worst = 0.0;
  for (std::size_t t = 1; t < f.size(); ++t) {
    integral += 0.5 * (s.times[t] - s.times[t - 1]) * (f[t] + f[t - 1]);
    worst = std::max(worst, std::abs(s.E[t] - s.E[0] - beta * integral));
  }
  return worst;
}

SpacingTable spacing_conservation(const PathBundle& particles, const std::vector<long>& m_values,
                                  std::size_t time_index, double rho) {
  if (particles.kind != PathBundle::Kind::Particles) {
    fail(ErrorCode::Precondition, "spacing conservation needs particle paths");
  }
  SpacingTable table;
  std::vector<double> ms, devs;
  for (long m : m_values) {
    if (!particles.indices().contains(m) || !particles.indices().contains(-m)) {
      fail(ErrorCode::OutOfWindow, "window does not span +-m");
    }
    const double avg = (particles.value(time_index, m) - particles.value(time_index, -m)) /
                       (2.0 * static_cast<double>(m));
    const double dev = std::abs(avg - rho);
    table.rows.push_back({m, dev});
    if (dev > 0.0) {
      ms.push_back(static_cast<double>(m));
      devs.push_back(dev);
    }
  }
  if (ms.size() >= 2) table.fitted_exponent = loglog_slope(ms, devs);
  return table;
}

double spacing_balance_residual(const PathBundle& particles, long m, const NoiseSource& noise,
                                const InteractionParams& params) {
  if (particles.kind != PathBundle::Kind::Particles) {
    fail(ErrorCode::Precondition, "spacing balance needs particle paths");
  }
  if (!particles.indices().contains(m) || !particles.indices().contains(-m)) {
    fail(ErrorCode::OutOfWindow, "window does not span +-m");
  }
  const double two_m = 2.0 * static_cast<double>(m);
  const auto lm = static_cast<std::size_t>(m - particles.offset);
  const auto lmm = static_cast<std::size_t>(-m - particles.offset);
  std::vector<double> f(particles.times.size());
  for (std::size_t t = 0; t < f.size(); ++t) {
    const auto& x = particles.states[t];
    f[t] = (kernel::phi(x, lm) - kernel::phi(x, lmm)) / two_m;
  }
  const double avg0 = (particles.value(0, m) - particles.value(0, -m)) / two_m;
  double bm = 0.0, bmm = 0.0, integral = 0.0, worst = 0.0;
  long step = 0;
  for (std::size_t t = 1; t < f.size(); ++t) {
    const long upto = std::lround(particles.times[t] / particles.dt);
    for (; step < upto; ++step) {
      bm += noise.particle_increment(m, step, particles.dt);
      bmm += noise.particle_increment(-m, step, particles.dt);
    }
    integral += 0.5 * (particles.times[t] - particles.times[t - 1]) * (f[t] + f[t - 1]);
    const double avg = (particles.value(t, m) - particles.value(t, -m)) / two_m;
    const double predicted = (bm - bmm) / two_m + params.beta * integral;
    worst = std::max(worst, std::abs(avg - avg0 - predicted));
  }
  return worst;
}

long partition_point(double x, double alpha) {
  const double v = std::floor(std::pow(std::abs(x), 1.0 / alpha));
  return x < 0 ? -static_cast<long>(v) : static_cast<long>(v);
}

std::vector<Cell> partition_cells(double alpha, double k, IndexRange keys) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::Precondition, "alpha must lie in (0,1)");
  if (!(k > 0.0)) fail(ErrorCode::Precondition, "k must be positive");
  std::vector<Cell> cells;
  auto cell = [&](long j) {
    Cell c;
    c.j = j;
    c.keys = {partition_point(k * static_cast<double>(j), alpha),
              partition_point(k * static_cast<double>(j + 1), alpha) - 1};
    return c;
  };
  auto check = [&](const Cell& c) {
    if (c.keys.empty()) {
      std::ostringstream os;
      os << "empty cell at b = " << c.j << " + 1/2 for k = " << k << "; increase k";
      fail(ErrorCode::DegeneratePartition, os.str());
    }
  };
  std::vector<Cell> left;
  for (long j = -1;; --j) {
    const Cell c = cell(j);
    check(c);
    if (!keys.contains(c.keys)) break;
    left.push_back(c);
  }
  cells.assign(left.rbegin(), left.rend());
  for (long j = 0;; ++j) {
    const Cell c = cell(j);
    check(c);
    if (!keys.contains(c.keys)) break;
    cells.push_back(c);
  }
  return cells;
}

double max_neighbor_ratio(const std::vector<Cell>& cells) {
  double worst = 0.0;
  for (std::size_t c = 0; c + 1 < cells.size(); ++c) {
    const double a = static_cast<double>(cells[c].keys.size());
    const double b = static_cast<double>(cells[c + 1].keys.size());
    worst = std::max({worst, a / b, b / a});
  }
  return worst;
}

DensityReport density_partition_check(const PathBundle& paths, double alpha, double k, double rho) {
  const bool particles = paths.kind == PathBundle::Kind::Particles;
  const IndexRange keys = particles ? IndexRange{paths.indices().first, paths.indices().last - 1}
                                    : paths.indices();
  const std::vector<Cell> cells = partition_cells(alpha, k, keys);
  if (cells.empty()) fail(ErrorCode::OutOfWindow, "window covers no partition cell");
  DensityReport r;
  r.cells = cells.size();
  r.min_average = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < paths.states.size(); ++t) {
    const std::vector<double> g = particles ? gaps_of(paths.states[t]) : paths.states[t];
    for (const Cell& c : cells) {
      double s = 0.0;
      for (long key = c.keys.first; key <= c.keys.last; ++key) {
        s += g[static_cast<std::size_t>(key - keys.first)];
      }
      const double avg = s / static_cast<double>(c.keys.size());
      if (avg < r.min_average) {
        r.min_average = avg;
        r.worst_cell = c.j;
        r.worst_time = t;
      }
    }
  }
  r.pass = r.min_average >= rho / 2.0;
  return r;
}

}  // namespace dysonflow
