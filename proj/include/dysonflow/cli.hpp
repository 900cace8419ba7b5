#pragma once

// Batch front end: JSON run specifications, the experiments they drive, and
// the deterministic self-test suites.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dysonflow/configspace.hpp"
#include "dysonflow/convergence.hpp"
#include "dysonflow/sde.hpp"

namespace dysonflow {

enum class Experiment { Simulate, Iterate, Converge, Diagnose, Density, Spacing, Oracle, Membership };

const char* to_string(Experiment e);

struct RunSpec {
  Experiment experiment = Experiment::Simulate;
  double beta = 2.0;
  double alpha = 0.3;
  double rho = 1.0;
  double p = 2.0;
  double gamma = 1.0;
  long window = 4;                 // lattice particles [-window, window]
  std::vector<long> ladder;        // converge: window radii, last one is the reference
  double dt = 1e-3;
  double T = 0.5;
  long replicas = 1;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::ImplicitSplitting;
  double substep_floor = 1e-4;
  int max_substep_depth = 12;
  long record_every = 1;
  unsigned threads = 1;
  std::string output = "out";
  std::optional<nlohmann::json> initial;  // explicit particle configuration

  // converge
  long tracked_index = 0;
  double p_prime = 2.0;
  std::vector<OpenSet> opens;
  // iterate
  int n_max = 3;
  double eps = 1e-3;
  int gamma_levels = 0;            // > 0 runs the ladder gamma_k = 2^-k
  // diagnose
  long i1 = -2;
  long i2 = 2;
  long m = 2;
  double up_shift = 0.25;
  // spacing, membership
  std::vector<long> m_values{8, 16, 32, 64};
  // density
  std::vector<double> k_candidates{1.0, 2.0, 3.0, 4.0};
  // oracle
  std::string oracle = "matrix";   // "matrix" or "bessel"
  int matrix_n = 8;
  long samples = 10000;
  long q_steps = 1000;
  std::vector<double> t_values{0.25, 1.0};
  std::optional<double> tau_target;
  // membership
  int sampler_n = 512;
  double sampler_window = 32.0;

  InteractionParams interaction() const;
  SchemeSpec scheme_spec() const;
  SpaceParams space() const;
};

// Parses and validates; throws DysonError(Validation) naming every offending
// field.
RunSpec parse_run_spec(const nlohmann::json& j);

// Every field with its resolved value.
nlohmann::json to_json(const RunSpec& spec);

struct RunResult {
  std::filesystem::path out_dir;
  std::vector<std::string> artifacts;  // file names relative to out_dir
};

// Runs the experiment and writes its CSV tables plus manifest.json into
// out_dir (spec.output when empty).
RunResult run(const RunSpec& spec, const std::filesystem::path& out_dir = {});

// Version string written into manifests.
const char* version();

// Compression term used by the identity suites; replaceable for mutation tests.
using PsiHook = std::function<double(double yval, const GapConfig& y, long key, IndexRange window)>;

struct SelftestOptions {
  PsiHook psi;  // defaults to psi_a
  int cases = 1000;
  std::uint64_t seed = 20240601;
};

struct SuiteResult {
  std::string name;
  bool pass = false;
  long cases = 0;
  double worst = 0.0;  // worst relative error or violation count
  std::string detail;
};

std::vector<SuiteResult> run_selftest(const SelftestOptions& options = {});

}  // namespace dysonflow
