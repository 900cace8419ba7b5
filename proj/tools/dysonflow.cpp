#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <json.hpp>

#include "dysonflow/cli.hpp"
#include "dysonflow/error.hpp"
#include "dysonflow/io.hpp"

namespace {

using nlohmann::json;

int report_error(const std::string& code, const std::string& message) {
  std::cerr << json{{"error", code}, {"message", message}}.dump() << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyson Brownian motion numerical laboratory"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 0;
  std::string out_dir;
  app.add_option("--threads", threads, "worker threads (overrides the spec)");
  app.add_option("--out-dir", out_dir, "output directory (overrides the spec)");

  auto* run_cmd = app.add_subcommand("run", "run an experiment from a JSON spec");
  std::string spec_path;
  run_cmd->add_option("spec", spec_path, "path to the run spec")->required();
  auto* selftest_cmd = app.add_subcommand("selftest", "run the deterministic identity suites");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      json j = json::parse(dysonflow::read_file(spec_path));
      if (const char* env = std::getenv("DYSONFLOW_SEED")) {
        char* end = nullptr;
        const unsigned long long seed = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') return report_error("validation", "DYSONFLOW_SEED is not an integer");
        if (j.is_object()) j["seed"] = seed;
      }
      dysonflow::RunSpec spec = dysonflow::parse_run_spec(j);
      if (threads > 0) spec.threads = threads;
      const auto result = dysonflow::run(spec, out_dir);
      for (const auto& a : result.artifacts) std::cout << (result.out_dir / a).string() << "\n";
      return 0;
    }
    if (*selftest_cmd) {
      const auto start = std::chrono::steady_clock::now();
      const auto suites = dysonflow::run_selftest();
      bool ok = true;
      for (const auto& s : suites) {
        std::cout << (s.pass ? "PASS " : "FAIL ") << s.name << " cases=" << s.cases << " worst=" << s.worst;
        if (!s.detail.empty()) std::cout << " (" << s.detail << ")";
        std::cout << "\n";
        ok = ok && s.pass;
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::cout << "selftest " << (ok ? "passed" : "failed") << " in " << secs << " s\n";
      return ok ? 0 : 1;
    }
  } catch (const dysonflow::DysonError& e) {
    return report_error(dysonflow::to_string(e.code()), e.what());
  } catch (const json::exception& e) {
    return report_error("validation", e.what());
  } catch (const std::exception& e) {
    return report_error("internal", e.what());
  }
  return 0;
}
