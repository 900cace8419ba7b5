#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "dysonflow/cli.hpp"
#include "dysonflow/error.hpp"

namespace dysonflow {

namespace {

using nlohmann::json;

const std::pair<const char*, Experiment> kExperiments[] = {
    {"simulate", Experiment::Simulate}, {"iterate", Experiment::Iterate},
    {"converge", Experiment::Converge}, {"diagnose", Experiment::Diagnose},
    {"density", Experiment::Density},   {"spacing", Experiment::Spacing},
    {"oracle", Experiment::Oracle},     {"membership", Experiment::Membership},
};

// Reads typed fields, recording one message per offending field.
class Reader {
 public:
  Reader(const json& j, std::vector<std::string>& errors) : j_(j), errors_(errors) {}

  template <class T, class Check>
  void get(const char* name, T& out, Check&& ok, const char* requirement) {
    seen_.insert(name);
    if (!j_.contains(name)) return;
    const json& v = j_.at(name);
    try {
      T value = convert<T>(v);
      if (!ok(value)) {
        bad(name, requirement);
        return;
      }
      out = std::move(value);
    } catch (const std::exception&) {
      bad(name, requirement);
    }
  }

  template <class T>
  void get(const char* name, T& out) {
    get(name, out, [](const T&) { return true; }, "wrong type");
  }

  void mark(const char* name) { seen_.insert(name); }

  void bad(const std::string& name, const std::string& requirement) {
    errors_.push_back(name + ": " + requirement);
  }

  void reject_unknown() {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) errors_.push_back(it.key() + ": unknown field");
    }
  }

 private:
  template <class T>
  static T convert(const json& v) {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw std::invalid_argument("number");
      return v.get<double>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw std::invalid_argument("integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.get<long long>() < 0 && !v.is_number_unsigned()) throw std::invalid_argument("sign");
      }
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw std::invalid_argument("string");
      return v.get<std::string>();
    } else {
      if (!v.is_array()) throw std::invalid_argument("array");
      T out;
      for (const auto& e : v) out.push_back(convert<typename T::value_type>(e));
      return out;
    }
  }

  const json& j_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

bool increasing(const std::vector<long>& v) {
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    if (!(v[k] < v[k + 1])) return false;
  }
  return true;
}

}  // namespace

const char* to_string(Experiment e) {
  for (const auto& [name, value] : kExperiments) {
    if (value == e) return name;
  }
  return "unknown";
}

InteractionParams RunSpec::interaction() const {
  InteractionParams p;
  p.beta = beta;
  return p;
}

SchemeSpec RunSpec::scheme_spec() const {
  SchemeSpec s;
  s.dt = dt;
  s.scheme = scheme;
  s.substep_floor = substep_floor;
  s.max_substep_depth = max_substep_depth;
  return s;
}

SpaceParams RunSpec::space() const {
  SpaceParams s;
  s.alpha = alpha;
  s.rho = rho;
  s.p = p;
  s.gamma = gamma;
  return s;
}

RunSpec parse_run_spec(const json& j) {
  std::vector<std::string> errors;
  if (!j.is_object()) throw DysonError(ErrorCode::Validation, "run spec must be a JSON object");
  RunSpec s;
  Reader r(j, errors);
  const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };

  std::string experiment;
  r.get("experiment", experiment);
  if (!j.contains("experiment")) {
    r.bad("experiment", "required");
  } else if (!experiment.empty()) {
    bool found = false;
    for (const auto& [name, value] : kExperiments) {
      if (experiment == name) {
        s.experiment = value;
        found = true;
      }
    }
    if (!found) r.bad("experiment", "unknown experiment '" + experiment + "'");
  }

  r.get("beta", s.beta, [](double v) { return v >= 1.0 && std::isfinite(v); }, "must be >= 1");
  r.get("alpha", s.alpha, [](double v) { return v > 0.0 && v < 1.0; }, "must lie in (0,1)");
  r.get("rho", s.rho, positive, "must be > 0");
  r.get("p", s.p, [](double v) { return v > 1.0 && std::isfinite(v); }, "must be > 1");
  r.get("gamma", s.gamma, [](double v) { return v >= 0.0 && std::isfinite(v); }, "must be >= 0");
  r.get("window", s.window, [](long v) { return v >= 1; }, "must be >= 1");
  r.get("ladder", s.ladder,
        [](const std::vector<long>& v) { return v.size() >= 2 && v.front() >= 1 && increasing(v); },
        "must be an increasing list of at least two radii >= 1");
  r.get("dt", s.dt, positive, "must be > 0");
  r.get("T", s.T, positive, "must be > 0");
  r.get("replicas", s.replicas, [](long v) { return v >= 1; }, "must be >= 1");
  r.get("seed", s.seed);
  std::string scheme;
  r.get("scheme", scheme);
  if (!scheme.empty()) {
    try {
      s.scheme = scheme_from_string(scheme);
    } catch (const DysonError&) {
      r.bad("scheme", "must be implicit-repulsion-splitting or tamed-explicit");
    }
  }
  r.get("substep_floor", s.substep_floor, [](double v) { return v >= 0.0; }, "must be >= 0");
  r.get("max_substep_depth", s.max_substep_depth, [](int v) { return v >= 0 && v <= 40; },
        "must lie in [0, 40]");
  r.get("record_every", s.record_every, [](long v) { return v >= 1; }, "must be >= 1");
  r.get("threads", s.threads, [](unsigned v) { return v >= 1; }, "must be >= 1");
  r.get("output", s.output, [](const std::string& v) { return !v.empty(); }, "must be non-empty");
  r.mark("initial");
  if (j.contains("initial")) {
    if (j.at("initial").is_object()) {
      s.initial = j.at("initial");
    } else {
      r.bad("initial", "must be a particle configuration object");
    }
  }

  r.get("tracked_index", s.tracked_index);
  r.get("p_prime", s.p_prime, positive, "must be > 0");
  r.mark("opens");
  if (j.contains("opens")) {
    const json& o = j.at("opens");
    bool ok = o.is_array();
    if (ok) {
      for (const auto& e : o) {
        if (!e.is_object() || !e.contains("lo") || !e.contains("hi") || !e.contains("time") ||
            !e.at("lo").is_number() || !e.at("hi").is_number() || !e.at("time").is_number() ||
            !(e.at("lo").get<double>() < e.at("hi").get<double>())) {
          ok = false;
          break;
        }
        s.opens.push_back({e.at("lo").get<double>(), e.at("hi").get<double>(), e.at("time").get<double>()});
      }
    }
    if (!ok) r.bad("opens", "must be a list of {lo, hi, time} with lo < hi");
  }
  r.get("n_max", s.n_max, [](int v) { return v >= 1; }, "must be >= 1");
  r.get("eps", s.eps, positive, "must be > 0");
  r.get("gamma_levels", s.gamma_levels, [](int v) { return v >= 0 && v <= 30; }, "must lie in [0, 30]");
  r.get("i1", s.i1);
  r.get("i2", s.i2);
  r.get("m", s.m, [](long v) { return v >= 1; }, "must be >= 1");
  r.get("up_shift", s.up_shift, positive, "must be > 0");
  r.get("m_values", s.m_values,
        [](const std::vector<long>& v) { return !v.empty() && v.front() >= 1 && increasing(v); },
        "must be an increasing non-empty list of integers >= 1");
  r.get("k_candidates", s.k_candidates,
        [](const std::vector<double>& v) {
          if (v.empty()) return false;
          for (std::size_t k = 0; k < v.size(); ++k) {
            if (!(v[k] > 0.0) || (k > 0 && !(v[k - 1] < v[k]))) return false;
          }
          return true;
        },
        "must be an increasing non-empty list of positive values");
  r.get("oracle", s.oracle, [](const std::string& v) { return v == "matrix" || v == "bessel"; },
        "must be matrix or bessel");
  r.get("matrix_n", s.matrix_n, [](int v) { return v >= 1 && v <= 64; }, "must lie in [1, 64]");
  r.get("samples", s.samples, [](long v) { return v >= 2; }, "must be >= 2");
  r.get("q_steps", s.q_steps, [](long v) { return v >= 1; }, "must be >= 1");
  r.get("t_values", s.t_values,
        [](const std::vector<double>& v) {
          if (v.empty()) return false;
          for (double t : v) {
            if (!(t > 0.0)) return false;
          }
          return true;
        },
        "must be a non-empty list of positive times");
  double tau = 0.0;
  r.get("tau_target", tau, positive, "must be > 0");
  if (j.contains("tau_target") && tau > 0.0) s.tau_target = tau;
  r.get("sampler_n", s.sampler_n, [](int v) { return v >= 2 && v <= 4096; }, "must lie in [2, 4096]");
  r.get("sampler_window", s.sampler_window, positive, "must be > 0");
  r.reject_unknown();

  // Cross-field checks.
  if (j.contains("dt") && j.contains("T") && s.dt > 0.0 && s.T > 0.0) {
    try {
      step_count(s.T, s.dt);
    } catch (const DysonError&) {
      r.bad("T", "must be an integer multiple of dt");
    }
  }
  if (s.experiment == Experiment::Converge && s.ladder.empty()) r.bad("ladder", "required for converge");
  if (s.experiment == Experiment::Diagnose) {
    if (!(s.i1 < s.i2)) r.bad("i1", "must be < i2");
    if (s.i1 < -s.window || s.i2 > s.window) r.bad("i2", "i1 and i2 must lie within [-window, window]");
  }
  if (s.experiment == Experiment::Oracle && s.oracle == "matrix" && s.beta != 1.0 && s.beta != 2.0) {
    r.bad("beta", "matrix oracle needs beta 1 or 2");
  }
  if (s.experiment == Experiment::Membership && !(s.alpha < 0.5)) {
    r.bad("alpha", "membership statistics need alpha < 1/2");
  }
  if (s.experiment == Experiment::Membership && s.sampler_window > s.sampler_n / 16.0) {
    r.bad("sampler_window", "must be <= sampler_n / 16");
  }
  if ((s.experiment == Experiment::Spacing) && s.m_values.back() >= s.window) {
    r.bad("m_values", "largest m must be < window");
  }

  if (!errors.empty()) {
    std::ostringstream os;
    os << "invalid run spec:";
    for (const auto& e : errors) os << "\n  " << e;
    throw DysonError(ErrorCode::Validation, os.str());
  }
  return s;
}

json to_json(const RunSpec& s) {
  json opens = json::array();
  for (const auto& o : s.opens) opens.push_back({{"lo", o.lo}, {"hi", o.hi}, {"time", o.time}});
  json j = {
      {"experiment", to_string(s.experiment)},
      {"beta", s.beta},
      {"alpha", s.alpha},
      {"rho", s.rho},
      {"p", s.p},
      {"gamma", s.gamma},
      {"window", s.window},
      {"dt", s.dt},
      {"T", s.T},
      {"replicas", s.replicas},
      {"seed", s.seed},
      {"scheme", to_string(s.scheme)},
      {"substep_floor", s.substep_floor},
      {"max_substep_depth", s.max_substep_depth},
      {"record_every", s.record_every},
      {"threads", s.threads},
      {"output", s.output},
      {"tracked_index", s.tracked_index},
      {"p_prime", s.p_prime},
      {"opens", opens},
      {"n_max", s.n_max},
      {"eps", s.eps},
      {"gamma_levels", s.gamma_levels},
      {"i1", s.i1},
      {"i2", s.i2},
      {"m", s.m},
      {"up_shift", s.up_shift},
      {"m_values", s.m_values},
      {"k_candidates", s.k_candidates},
      {"oracle", s.oracle},
      {"matrix_n", s.matrix_n},
      {"samples", s.samples},
      {"q_steps", s.q_steps},
      {"t_values", s.t_values},
      {"sampler_n", s.sampler_n},
      {"sampler_window", s.sampler_window},
  };
  if (!s.ladder.empty()) j["ladder"] = s.ladder;
  if (s.initial) j["initial"] = *s.initial;
  if (s.tau_target) j["tau_target"] = *s.tau_target;
  return j;
}

}  // namespace dysonflow
