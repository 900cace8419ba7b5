#include <algorithm>
#include <cmath>
#include <limits>

#include "dysonflow/cli.hpp"
#include "dysonflow/convergence.hpp"
#include "dysonflow/error.hpp"
#include "dysonflow/io.hpp"
#include "dysonflow/iteration.hpp"
#include "dysonflow/oracles.hpp"
#include "dysonflow/parallel.hpp"
#include "dysonflow/stats.hpp"

namespace dysonflow {

const char* version() { return "dysonflow 1.0.0"; }

namespace {

using nlohmann::json;

struct Output {
  std::filesystem::path dir;
  std::vector<std::string> artifacts;

  void write(const std::string& name, const std::string& text) {
    write_atomic(dir / name, text);
    artifacts.push_back(name);
  }
};

// Lattice rho * i on [first, last] unless the spec carries an explicit
// configuration.
ParticleConfig initial_particles(const RunSpec& s, long first, long last) {
  if (s.initial) return particles_from_json(*s.initial);
  return ParticleConfig::lattice(first, last, s.rho);
}

GapConfig lattice_gaps(const RunSpec& s, double value) {
  return GapConfig(-s.window, std::vector<double>(static_cast<std::size_t>(2 * s.window), value));
}

std::string replica_name(const std::string& stem, long replicas, std::size_t r) {
  if (replicas == 1) return stem + ".csv";
  return stem + "_r" + std::to_string(r) + ".csv";
}

void run_simulate(const RunSpec& s, Output& out) {
  const ParticleConfig x0 = initial_particles(s, -s.window, s.window);
  std::vector<std::string> texts(static_cast<std::size_t>(s.replicas));
  parallel_for(texts.size(), s.threads, [&](std::size_t r) {
    const NoiseSource noise(s.seed, r);
    const PathBundle p =
        simulate_particles(x0, s.interaction(), s.scheme_spec(), noise, s.T, s.record_every);
    texts[r] = trajectory_csv(p).text();
  });
  for (std::size_t r = 0; r < texts.size(); ++r) out.write(replica_name("trajectory", s.replicas, r), texts[r]);
}

void run_iterate(const RunSpec& s, Output& out) {
  const GapConfig y_in = s.initial ? to_gaps(particles_from_json(*s.initial)).gaps : lattice_gaps(s, s.rho);
  const InteractionParams params = s.interaction();
  const SchemeSpec spec = s.scheme_spec();
  const auto R = static_cast<std::size_t>(s.replicas);

  if (s.gamma_levels == 0) {
    CsvTable report({"replica", "stage", "sup_diff", "violation"});
    std::vector<DecreasingReport> reports(R);
    std::vector<std::string> paths(R);
    parallel_for(R, s.threads, [&](std::size_t r) {
      IterationState st = start_iteration(y_in, s.gamma, NoiseSource(s.seed, r), s.T);
      for (int n = 0; n <= s.n_max; ++n) st = iterate_stage(std::move(st), params, spec);
      reports[r] = check_decreasing(st, 10.0 * s.dt);
      CsvTable t({"stage", "time", "index", "value"});
      for (std::size_t k = 0; k < st.paths.size(); ++k) {
        const PathBundle& p = st.paths[k];
        for (std::size_t ti = 0; ti < p.times.size(); ti += static_cast<std::size_t>(s.record_every)) {
          for (std::size_t a = 0; a < p.states[ti].size(); ++a) {
            t.cell(k).cell(p.times[ti]).cell(p.offset + static_cast<long>(a)).cell(p.states[ti][a]);
            t.end_row();
          }
        }
      }
      paths[r] = t.text();
    });
    for (std::size_t r = 0; r < R; ++r) {
      for (std::size_t k = 0; k < reports[r].stage_diffs.size(); ++k) {
        report.cell(r).cell(k + 1).cell(reports[r].stage_diffs[k]).cell(reports[r].pair_violation[k]);
        report.end_row();
      }
      out.write(replica_name("stages", s.replicas, r), paths[r]);
    }
    out.write("stage_report.csv", report.text());
    return;
  }

  const std::vector<double> gammas = gamma_ladder(s.gamma_levels);
  std::vector<std::vector<IterationResult>> results(R);
  parallel_for(R, s.threads, [&](std::size_t r) {
    for (double g : gammas) {
      results[r].push_back(iterate_to_tolerance(y_in, g, s.n_max, s.eps, params, spec,
                                                NoiseSource(s.seed, r), s.T));
    }
  });
  CsvTable t({"replica", "level", "gamma", "n_used", "last_diff", "converged", "excess_over_previous"});
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t k = 0; k < gammas.size(); ++k) {
      const IterationResult& res = results[r][k];
      const double excess = k == 0 ? 0.0 : path_max_excess(res.path, results[r][k - 1].path);
      t.cell(r).cell(k + 1).cell(gammas[k]).cell(static_cast<long>(res.n_used));
      t.cell(res.diffs.empty() ? 0.0 : res.diffs.back()).cell(res.converged ? "true" : "false").cell(excess);
      t.end_row();
    }
  }
  out.write("gamma_ladder.csv", t.text());
}

void run_converge(const RunSpec& s, Output& out) {
  const long reach = static_cast<long>(std::ceil(static_cast<double>(s.ladder.back()) / s.rho)) + 1;
  const ParticleConfig x_in = initial_particles(s, -reach, reach);
  const WindowLadder ladder = make_windows(x_in, s.ladder);
  ReplicaPlan plan{s.seed, s.replicas, s.threads};
  const CoupledErrors errs = coupled_errors(x_in, ladder, s.interaction(), s.scheme_spec(), s.T,
                                            s.tracked_index, s.p_prime, plan);
  CsvTable rows({"replica", "n", "applicable", "sup_error", "power_error"});
  for (const auto& row : errs.rows) {
    rows.cell(row.replica).cell(row.n).cell(row.applicable ? "true" : "false");
    rows.cell(row.sup_error).cell(row.power_error);
    rows.end_row();
  }
  out.write("errors.csv", rows.text());
  CsvTable sum({"n", "first", "last", "replicas", "median_sup", "mean_power"});
  for (std::size_t w = 0; w < errs.summary.size(); ++w) {
    const auto& row = errs.summary[w];
    sum.cell(row.n).cell(ladder.windows[w].first).cell(ladder.windows[w].last);
    sum.cell(row.replicas).cell(row.median_sup).cell(row.mean_power);
    sum.end_row();
  }
  out.write("summary.csv", sum.text());
  if (!s.opens.empty()) {
    const auto corr = correlation_experiment(x_in, ladder, s.interaction(), s.scheme_spec(), s.T, s.opens, plan);
    CsvTable c({"n", "replicas", "mean_count"});
    for (const auto& row : corr) {
      c.cell(row.n).cell(row.replicas).cell(row.mean);
      c.end_row();
    }
    out.write("correlation.csv", c.text());
  }
}

void run_diagnose(const RunSpec& s, Output& out) {
  const GapConfig lw0 = s.initial ? to_gaps(particles_from_json(*s.initial)).gaps : lattice_gaps(s, s.rho);
  std::vector<double> upv(lw0.values().begin(), lw0.values().end());
  for (double& g : upv) g += s.up_shift;
  const GapConfig up0(lw0.offset(), upv);
  const auto R = static_cast<std::size_t>(s.replicas);
  std::vector<DiagnosticSeries> series(R);
  std::vector<double> excess(R);
  parallel_for(R, s.threads, [&](std::size_t r) {
    const NoiseSource noise(s.seed, r);
    const PathBundle up = simulate_gaps(up0, {}, s.interaction(), s.scheme_spec(), noise, s.T);
    const PathBundle lw = simulate_gaps(lw0, {}, s.interaction(), s.scheme_spec(), noise, s.T);
    series[r] = uniqueness_diagnostics(up, lw, s.i1, s.i2, s.m);
    excess[r] = path_max_excess(lw, up);
  });
  CsvTable t({"replica", "time", "E", "Lp_i1", "Lm_i1", "Lp_i2", "Lm_i2", "Lp_i1_near", "Lp_i1_far",
              "Lm_i1_near", "Lm_i1_far", "Lp_i2_near", "Lp_i2_far", "Lm_i2_near", "Lm_i2_far"});
  CsvTable sum({"replica", "balance_residual", "min_E", "order_violation"});
  for (std::size_t r = 0; r < R; ++r) {
    const DiagnosticSeries& d = series[r];
    for (std::size_t k = 0; k < d.times.size(); k += static_cast<std::size_t>(s.record_every)) {
      t.cell(r).cell(d.times[k]).cell(d.E[k]);
      t.cell(d.at_i1.plus[k].full).cell(d.at_i1.minus[k].full);
      t.cell(d.at_i2.plus[k].full).cell(d.at_i2.minus[k].full);
      for (const auto* b : {&d.at_i1.plus[k], &d.at_i1.minus[k], &d.at_i2.plus[k], &d.at_i2.minus[k]}) {
        t.cell(b->near).cell(b->far);
      }
      t.end_row();
    }
    sum.cell(r).cell(balance_residual(d, s.beta)).cell(*std::min_element(d.E.begin(), d.E.end()));
    sum.cell(excess[r]);
    sum.end_row();
  }
  out.write("diagnostics.csv", t.text());
  out.write("summary.csv", sum.text());
}

void run_density(const RunSpec& s, Output& out) {
  const ParticleConfig x0 = initial_particles(s, -s.window, s.window);
  const auto R = static_cast<std::size_t>(s.replicas);
  const std::size_t K = s.k_candidates.size();
  struct Cellrow {
    bool degenerate = false;
    DensityReport report;
    double ratio = 0.0;
  };
  std::vector<Cellrow> rows(R * K);
  parallel_for(R, s.threads, [&](std::size_t r) {
    const PathBundle p = simulate_particles(x0, s.interaction(), s.scheme_spec(), NoiseSource(s.seed, r), s.T,
                                            s.record_every);
    for (std::size_t k = 0; k < K; ++k) {
      Cellrow& row = rows[r * K + k];
      try {
        row.report = density_partition_check(p, s.alpha, s.k_candidates[k], s.rho);
        row.ratio = max_neighbor_ratio(
            partition_cells(s.alpha, s.k_candidates[k], {p.indices().first, p.indices().last - 1}));
      } catch (const DysonError& e) {
        if (e.code() != ErrorCode::DegeneratePartition && e.code() != ErrorCode::OutOfWindow) throw;
        row.degenerate = true;
      }
    }
  });
  CsvTable t({"replica", "k", "status", "cells", "min_average", "worst_cell", "worst_time", "max_ratio", "pass"});
  std::vector<bool> all_pass(K, true);
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t k = 0; k < K; ++k) {
      const Cellrow& row = rows[r * K + k];
      t.cell(r).cell(s.k_candidates[k]).cell(row.degenerate ? "degenerate" : "ok");
      t.cell(row.report.cells).cell(row.report.min_average).cell(row.report.worst_cell);
      t.cell(row.report.worst_time).cell(row.ratio).cell(row.report.pass ? "true" : "false");
      t.end_row();
      if (row.degenerate || !row.report.pass) all_pass[k] = false;
    }
  }
  out.write("density.csv", t.text());
  CsvTable sum({"k", "all_replicas_pass", "chosen"});
  std::optional<std::size_t> chosen;
  for (std::size_t k = K; k-- > 0;) {
    if (!all_pass[k]) break;
    chosen = k;
  }
  for (std::size_t k = 0; k < K; ++k) {
    sum.cell(s.k_candidates[k]).cell(all_pass[k] ? "true" : "false").cell(chosen == k ? "true" : "false");
    sum.end_row();
  }
  out.write("summary.csv", sum.text());
}

void run_spacing(const RunSpec& s, Output& out) {
  const ParticleConfig x0 = initial_particles(s, -s.window, s.window);
  const auto R = static_cast<std::size_t>(s.replicas);
  const std::size_t M = s.m_values.size();
  std::vector<double> dev(R * M), resid(R * M);
  parallel_for(R, s.threads, [&](std::size_t r) {
    const NoiseSource noise(s.seed, r);
    const PathBundle p = simulate_particles(x0, s.interaction(), s.scheme_spec(), noise, s.T, s.record_every);
    const SpacingTable tab = spacing_conservation(p, s.m_values, p.times.size() - 1, s.rho);
    for (std::size_t k = 0; k < M; ++k) {
      dev[r * M + k] = tab.rows[k].deviation;
      resid[r * M + k] = spacing_balance_residual(p, s.m_values[k], noise, s.interaction());
    }
  });
  CsvTable t({"replica", "m", "deviation", "balance_residual"});
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t k = 0; k < M; ++k) {
      t.cell(r).cell(s.m_values[k]).cell(dev[r * M + k]).cell(resid[r * M + k]);
      t.end_row();
    }
  }
  out.write("spacing.csv", t.text());
  CsvTable sum({"m", "mean_deviation", "max_balance_residual"});
  std::vector<double> ms, means;
  for (std::size_t k = 0; k < M; ++k) {
    std::vector<double> d;
    double worst = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      d.push_back(dev[r * M + k]);
      worst = std::max(worst, resid[r * M + k]);
    }
    ms.push_back(static_cast<double>(s.m_values[k]));
    means.push_back(mean(d));
    sum.cell(s.m_values[k]).cell(means.back()).cell(worst);
    sum.end_row();
  }
  out.write("summary.csv", sum.text());
  if (M >= 2) {
    CsvTable fit({"fitted_exponent", "reference_exponent"});
    fit.cell(loglog_slope(ms, means)).cell(s.alpha - 1.0);
    fit.end_row();
    out.write("fit.csv", fit.text());
  }
}

std::vector<double> centred_lattice(int N, double rho) {
  std::vector<double> v;
  for (int i = 0; i < N; ++i) v.push_back(rho * (i - (N - 1) / 2.0));
  return v;
}

void run_oracle(const RunSpec& s, Output& out) {
  if (s.oracle == "bessel") {
    BesselMomentSpec q;
    q.beta = s.beta;
    q.samples = s.samples;
    q.steps = s.q_steps;
    q.seed = s.seed;
    q.threads = s.threads;
    CsvTable t({"t", "p", "estimate", "ci_half", "samples"});
    for (double tv : s.t_values) {
      const BesselMoment m = q_estimate(tv, s.p_prime, q);
      t.cell(m.t).cell(m.p).cell(m.estimate).cell(m.ci_half).cell(m.samples);
      t.end_row();
    }
    out.write("q.csv", t.text());
    if (s.tau_target) {
      const TauSolution sol = solve_tau(*s.tau_target, q);
      CsvTable tau({"target", "tau", "estimate", "ci_half", "residual", "iterations"});
      tau.cell(*s.tau_target).cell(sol.tau).cell(sol.at_tau.estimate).cell(sol.at_tau.ci_half);
      tau.cell(sol.residual).cell(static_cast<long>(sol.iterations));
      tau.end_row();
      out.write("tau.csv", tau.text());
    }
    return;
  }
  const int N = s.matrix_n;
  const std::vector<double> init = centred_lattice(N, s.rho);
  const long off = -static_cast<long>(N / 2);
  const ParticleConfig x0(off, init);
  const auto R = static_cast<std::size_t>(s.replicas);
  const long steps = step_count(s.T, s.dt);
  std::vector<std::vector<double>> mat(R), sde(R);
  std::vector<double> resid(R);
  parallel_for(R, s.threads, [&](std::size_t r) {
    MatrixEnsembleSpec m;
    m.beta = static_cast<int>(s.beta);
    m.N = N;
    m.dt = s.dt;
    m.T = s.T;
    m.seed = s.seed;
    m.stream = r;
    m.record_every = steps;
    m.initial = init;
    const EigenTrajectory e = matrix_dbm_sample(m);
    mat[r] = e.eigenvalues.back();
    resid[r] = e.max_residual;
    const PathBundle p = simulate_particles(x0, s.interaction(), s.scheme_spec(), NoiseSource(s.seed, r), s.T, steps);
    sde[r] = p.states.back();
  });
  CsvTable spectra({"side", "replica", "index", "value"});
  std::vector<double> pooled_m, pooled_s;
  double worst_resid = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    for (int i = 0; i < N; ++i) {
      const auto k = static_cast<std::size_t>(i);
      spectra.cell("matrix").cell(r).cell(off + i).cell(mat[r][k]);
      spectra.end_row();
      pooled_m.push_back(mat[r][k]);
    }
    for (int i = 0; i < N; ++i) {
      const auto k = static_cast<std::size_t>(i);
      spectra.cell("sde").cell(r).cell(off + i).cell(sde[r][k]);
      spectra.end_row();
      pooled_s.push_back(sde[r][k]);
    }
    worst_resid = std::max(worst_resid, resid[r]);
  }
  out.write("spectra.csv", spectra.text());
  CsvTable ks({"beta", "N", "t", "replicas", "ks", "max_eigen_residual"});
  ks.cell(s.beta).cell(static_cast<long>(N)).cell(s.T).cell(s.replicas);
  ks.cell(ks_two_sample(pooled_m, pooled_s)).cell(worst_resid);
  ks.end_row();
  out.write("ks.csv", ks.text());
}

void run_membership(const RunSpec& s, Output& out) {
  const auto R = static_cast<std::size_t>(s.replicas);
  const std::size_t M = s.m_values.size();
  std::vector<SineMembership> stats(R * M);
  parallel_for(R, s.threads, [&](std::size_t r) {
    const ParticleConfig x = sine_like_sample({s.sampler_n, s.sampler_window, s.seed, r});
    for (std::size_t k = 0; k < M; ++k) stats[r * M + k] = membership_stats_sine(x, s.space(), s.m_values[k]);
  });
  CsvTable t({"replica", "m_max", "xsp", "rsp"});
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t k = 0; k < M; ++k) {
      t.cell(r).cell(s.m_values[k]).cell(stats[r * M + k].xsp).cell(stats[r * M + k].rsp);
      t.end_row();
    }
  }
  out.write("membership.csv", t.text());
}

}  // namespace

RunResult run(const RunSpec& spec, const std::filesystem::path& out_dir) {
  Output out;
  out.dir = out_dir.empty() ? std::filesystem::path(spec.output) : out_dir;
  std::filesystem::create_directories(out.dir);
  switch (spec.experiment) {
    case Experiment::Simulate: run_simulate(spec, out); break;
    case Experiment::Iterate: run_iterate(spec, out); break;
    case Experiment::Converge: run_converge(spec, out); break;
    case Experiment::Diagnose: run_diagnose(spec, out); break;
    case Experiment::Density: run_density(spec, out); break;
    case Experiment::Spacing: run_spacing(spec, out); break;
    case Experiment::Oracle: run_oracle(spec, out); break;
    case Experiment::Membership: run_membership(spec, out); break;
  }
  json manifest = {
      {"version", version()},
      {"seed", spec.seed},
      {"spec", to_json(spec)},
      {"artifacts", out.artifacts},
  };
  write_atomic(out.dir / "manifest.json", manifest.dump(2) + "\n");
  RunResult r;
  r.out_dir = out.dir;
  r.artifacts = out.artifacts;
  r.artifacts.push_back("manifest.json");
  return r;
}

}  // namespace dysonflow
