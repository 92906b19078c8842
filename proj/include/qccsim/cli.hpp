#pragma once

// Scenario dispatch behind the qccsim command line.
//
// A RunConfig is a scenario name plus a flat string map of parameters (flag names
// without the leading dashes). Values stay strings until validation so that a config
// echo reproduces a run exactly and sweep ranges ("start:stop:count") fit the same map.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qccsim/errors.hpp"
#include "qccsim/montecarlo.hpp"
#include "qccsim/neutron.hpp"
#include "qccsim/qcc.hpp"
#include "qccsim/weakmeas.hpp"

namespace qccsim::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutputDirEnv = "QCCSIM_OUTPUT_DIR";

inline const std::vector<std::string>& scenarios() {
  static const std::vector<std::string> s{"weak-value",       "qcc",      "qcc-joint", "neutron-absorber",
                                          "neutron-magnetic", "montecarlo", "sweep"};
  return s;
}

// Parameters each scenario accepts.
inline const std::map<std::string, std::set<std::string>>& accepted_params() {
  static const std::map<std::string, std::set<std::string>> m{
      {"weak-value", {"context", "observable", "tan-theta", "g", "pointer-width", "grid-points"}},
      {"qcc", {"g", "g-I", "g-II", "observable-I", "observable-II", "pointer-width", "postselection"}},
      {"qcc-joint",
       {"g", "g-I", "g-II", "observable-I", "observable-II", "pointer-width", "postselection", "grid-points"}},
      {"neutron-absorber", {"arm", "M"}},
      {"neutron-magnetic", {"arm", "alpha"}},
      {"montecarlo",
       {"experiment", "context", "observable", "tan-theta", "g", "pointer-width", "n", "seed", "workers", "arm", "M",
        "alpha"}},
  };
  return m;
}

struct RunConfig {
  std::string scenario;
  std::map<std::string, std::string> params;
  std::optional<std::string> out_json;
  std::optional<std::string> out_csv;
};

struct Violation {
  std::string field;
  std::string constraint;
};

struct RunResult {
  nlohmann::json record;
  std::optional<std::string> csv;
};

inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct SweepRange {
  double start;
  double stop;
  std::size_t count;

  std::vector<double> values() const {
    std::vector<double> v;
    for (std::size_t i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
      v.push_back((1.0 - t) * start + t * stop);  // exact at both ends
    }
    return v;
  }
};

inline bool is_range(const std::string& s) { return s.find(':') != std::string::npos; }

namespace detail {

inline std::optional<double> parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

inline SweepRange parse_range(const std::string& key, const std::string& s) {
  const auto a = s.find(':');
  const auto b = s.find(':', a + 1);
  if (b == std::string::npos) throw ConfigParseError("sweep range for '" + key + "' must be start:stop:count");
  const auto start = parse_double(s.substr(0, a));
  const auto stop = parse_double(s.substr(a + 1, b - a - 1));
  const auto count = parse_double(s.substr(b + 1));
  if (!start || !stop || !count || *count < 1 || *count != std::floor(*count)) {
    throw ConfigParseError("malformed sweep range '" + s + "' for '" + key + "'");
  }
  return {*start, *stop, static_cast<std::size_t>(*count)};
}

class Params {
 public:
  explicit Params(const std::map<std::string, std::string>& p) : p_(p) {}

  bool has(const std::string& k) const { return p_.count(k) != 0; }

  double number(const std::string& k, double fallback) const {
    auto it = p_.find(k);
    if (it == p_.end()) return fallback;
    const auto v = parse_double(it->second);
    if (!v) throw ConfigParseError("parameter '" + k + "' is not a number: '" + it->second + "'");
    return *v;
  }

  std::string text(const std::string& k, const std::string& fallback) const {
    auto it = p_.find(k);
    return it == p_.end() ? fallback : it->second;
  }

 private:
  const std::map<std::string, std::string>& p_;
};

inline const std::map<std::string, std::string>& scenario_defaults(const std::string& scenario) {
  static const std::map<std::string, std::map<std::string, std::string>> d{
      {"weak-value",
       {{"context", "qcc"}, {"tan-theta", "3"}, {"g", "0.02"}, {"pointer-width", "1"}, {"grid-points", "1024"}}},
      {"qcc", {{"g", "0.02"}, {"observable-I", "projector"}, {"observable-II", "sigma_x"}, {"pointer-width", "1"},
               {"postselection", "standard"}}},
      {"qcc-joint", {{"g", "0.02"}, {"observable-I", "projector"}, {"observable-II", "sigma_x"},
                     {"pointer-width", "1"}, {"postselection", "standard"}, {"grid-points", "128"}}},
      {"neutron-absorber", {{"arm", "I"}, {"M", "0.1"}}},
      {"neutron-magnetic", {{"arm", "I"}, {"alpha", "0.2"}}},
      {"montecarlo", {{"experiment", "weak"}, {"context", "qcc"}, {"tan-theta", "3"}, {"g", "0.05"},
                      {"pointer-width", "1"}, {"n", "100000"}, {"seed", "1"}, {"arm", "I"}, {"M", "0.1"},
                      {"alpha", "0.2"}}},
  };
  static const std::map<std::string, std::string> empty;
  auto it = d.find(scenario);
  return it == d.end() ? empty : it->second;
}

inline std::map<std::string, std::string> with_defaults(const std::string& scenario,
                                                        const std::map<std::string, std::string>& p) {
  auto out = scenario_defaults(scenario);
  for (const auto& [k, v] : p) out[k] = v;
  return out;
}

inline Arm parse_arm(const std::string& s) {
  if (s == "I" || s == "1") return Arm::I;
  if (s == "II" || s == "2") return Arm::II;
  throw ConfigParseError("arm must be I or II, got '" + s + "'");
}

inline ObservableTag parse_observable_tag(const std::string& s) {
  if (s == "projector" || s == "pi") return ObservableTag::projector;
  if (s == "sigma_x" || s == "sigma-x" || s == "sigma") return ObservableTag::sigma_x;
  throw ConfigParseError("observable must be projector or sigma_x, got '" + s + "'");
}

inline Postselection parse_postselection(const std::string& s) {
  if (s == "standard") return Postselection::standard;
  if (s == "swapped") return Postselection::swapped;
  throw ConfigParseError("postselection must be standard or swapped, got '" + s + "'");
}

// Weak-measurement context plus observable picked by the weak-value and montecarlo scenarios.
struct WeakScenario {
  PrePostContext ctx;
  Observable observable;
  GaussianPointerState phi0;
  double g;
};

// Anomalous spin context: pre |+z>, post cos(t)<+z| + sin(t)<-z| with tan(t) given.
inline PrePostContext anomalous_context(double tan_theta) {
  const double t = std::atan(tan_theta);
  return PrePostContext(StateVector::single(kSpinLabel, {1.0, 0.0}),
                        StateVector::single(kSpinLabel, {std::cos(t), std::sin(t)}));
}

inline Observable spin_observable(const std::string& name) {
  if (name == "sigma-x" || name == "sigma_x") return Observable::from_operator({kSpinLabel}, Operator::pauli_x());
  if (name == "identity") return Observable::from_operator({kSpinLabel}, Operator::identity({2}).with_kind(OperatorKind::hermitian));
  throw ConfigParseError("anomalous context observable must be sigma-x or identity, got '" + name + "'");
}

inline Observable qcc_observable(const std::string& name) {
  if (name == "pi-I") return arm_projector(Arm::I);
  if (name == "pi-II") return arm_projector(Arm::II);
  if (name == "sigma-I") return arm_sigma_x(Arm::I);
  if (name == "sigma-II") return arm_sigma_x(Arm::II);
  throw ConfigParseError("qcc context observable must be pi-I, pi-II, sigma-I or sigma-II, got '" + name + "'");
}

inline WeakScenario weak_scenario(const Params& p) {
  const auto context = p.text("context", "qcc");
  const double g = p.number("g", 0.02);
  const auto phi0 = make_gaussian(0.0, p.number("pointer-width", 1.0));
  if (context == "qcc") {
    return {build_prepost(), qcc_observable(p.text("observable", "pi-I")), phi0, g};
  }
  if (context == "anomalous") {
    return {anomalous_context(p.number("tan-theta", 3.0)), spin_observable(p.text("observable", "sigma-x")), phi0, g};
  }
  throw ConfigParseError("context must be qcc or anomalous, got '" + context + "'");
}

inline QccConfig qcc_config(const Params& p) {
  QccConfig cfg;
  const double g = p.number("g", 0.0);
  cfg.g_I = p.number("g-I", g);
  cfg.g_II = p.number("g-II", g);
  cfg.observable_I = parse_observable_tag(p.text("observable-I", "projector"));
  cfg.observable_II = parse_observable_tag(p.text("observable-II", "sigma_x"));
  cfg.pointer_width = p.number("pointer-width", 1.0);
  cfg.postselection = parse_postselection(p.text("postselection", "standard"));
  return cfg;
}

inline std::size_t grid_points(const Params& p, double fallback) {
  return static_cast<std::size_t>(p.number("grid-points", fallback));
}

inline std::string grid_csv(const GaussianPointerState& p, std::size_t n_points) {
  if (p.norm_squared() <= 0.0) return "x,re,im,prob_density\n";
  const auto [lo, hi] = support(p, 10.0);
  std::ostringstream os;
  to_grid(p, lo, hi, n_points).write_csv(os);
  return os.str();
}

}  // namespace detail

// Pure check of every precondition; no computation.
inline std::vector<Violation> validate(const RunConfig& cfg) {
  std::vector<Violation> out;
  auto add = [&](std::string f, std::string c) { out.push_back({std::move(f), std::move(c)}); };

  std::string scenario = cfg.scenario;
  std::map<std::string, std::string> params = cfg.params;
  std::string swept;
  if (scenario == "sweep") {
    auto it = params.find("scenario");
    if (it == params.end()) {
      add("scenario", "sweep requires --scenario");
      return out;
    }
    scenario = it->second;
    params.erase(it);
    static const std::set<std::string> sweepable{"qcc", "neutron-absorber", "neutron-magnetic", "weak-value"};
    if (!sweepable.count(scenario)) {
      add("scenario", "sweep scenario must be one of qcc, neutron-absorber, neutron-magnetic, weak-value");
      return out;
    }
    for (const auto& [k, v] : params) {
      if (!is_range(v)) continue;
      if (!swept.empty()) add(k, "only one parameter may be swept");
      swept = k;
    }
    if (swept.empty()) add("sweep", "one parameter must be given as start:stop:count");
  }
  const auto acc = accepted_params().find(scenario);
  if (acc == accepted_params().end()) {
    add("scenario", "unknown scenario '" + scenario + "'");
    return out;
  }
  for (const auto& [k, v] : params) {
    if (!acc->second.count(k)) add(k, "not a parameter of scenario '" + scenario + "'");
  }

  const auto merged = detail::with_defaults(scenario, params);
  auto numeric = [&](const std::string& k) -> std::optional<double> {
    auto it = merged.find(k);
    if (it == merged.end()) return std::nullopt;
    if (is_range(it->second)) {
      try {
        return detail::parse_range(k, it->second).start;
      } catch (const ConfigParseError& e) {
        add(k, e.what());
        return std::nullopt;
      }
    }
    const auto v = detail::parse_double(it->second);
    if (!v) add(k, "must be a number");
    else if (!std::isfinite(*v)) add(k, "must be finite");
    return v;
  };
  auto range_min = [&](const std::string& k) -> std::optional<double> {
    auto it = merged.find(k);
    if (it == merged.end() || !is_range(it->second)) return numeric(k);
    try {
      const auto r = detail::parse_range(k, it->second);
      return std::min(r.start, r.stop);
    } catch (const ConfigParseError&) {
      return std::nullopt;
    }
  };
  auto one_of = [&](const std::string& k, std::set<std::string> allowed) {
    auto it = merged.find(k);
    if (it != merged.end() && !allowed.count(it->second)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      add(k, "must be one of " + list);
    }
  };

  if (auto w = range_min("pointer-width"); w && !(*w > 0.0)) add("pointer-width", "must be > 0");
  for (const auto* k : {"g", "g-I", "g-II", "tan-theta"}) (void)numeric(k);
  if (auto m = range_min("M"); m && *m < 0.0) add("M", "must be >= 0");
  if (merged.count("alpha")) {
    auto it = merged.find("alpha");
    double worst = 0.0;
    bool ok = true;
    if (is_range(it->second)) {
      try {
        const auto r = detail::parse_range("alpha", it->second);
        worst = std::max(std::abs(r.start), std::abs(r.stop));
      } catch (const ConfigParseError& e) {
        add("alpha", e.what());
        ok = false;
      }
    } else if (auto v = detail::parse_double(it->second)) {
      worst = std::abs(*v);
    } else {
      add("alpha", "must be a number");
      ok = false;
    }
    if (ok && worst > std::numbers::pi) add("alpha", "must satisfy |alpha| <= pi");
  }
  if (auto n = numeric("n"); n && (*n < 1 || *n != std::floor(*n))) add("n", "must be an integer >= 1");
  if (auto s = numeric("seed"); s && (*s < 0 || *s != std::floor(*s))) add("seed", "must be a non-negative integer");
  if (auto w = numeric("workers"); w && (*w < 1 || *w != std::floor(*w))) add("workers", "must be an integer >= 1");
  if (auto n = numeric("grid-points"); n) {
    if (*n < 2 || *n != std::floor(*n)) {
      add("grid-points", "must be an integer >= 2");
    } else if (scenario == "weak-value" && std::exp2(std::round(std::log2(*n))) != *n) {
      add("grid-points", "must be a power of two");
    }
  }
  one_of("arm", {"I", "II"});
  one_of("observable-I", {"projector", "sigma_x"});
  one_of("observable-II", {"projector", "sigma_x"});
  one_of("postselection", {"standard", "swapped"});
  one_of("context", {"qcc", "anomalous"});
  one_of("experiment", {"weak", "absorber", "magnetic"});
  if (merged.count("observable")) {
    const auto ctx = merged.at("context");
    if (ctx == "qcc") one_of("observable", {"pi-I", "pi-II", "sigma-I", "sigma-II"});
    if (ctx == "anomalous") one_of("observable", {"sigma-x", "identity"});
  }
  if (scenario == "montecarlo" && merged.at("experiment") == "weak") {
    if (auto g = numeric("g"); g && *g == 0.0) add("g", "must be non-zero for weak value estimation");
  }
  return out;
}

namespace detail {

inline nlohmann::json violations_json(const std::vector<Violation>& v) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& x : v) j.push_back({{"field", x.field}, {"constraint", x.constraint}});
  return j;
}

inline nlohmann::json run_weak_value(const Params& p, std::optional<std::string>* csv) {
  const auto s = weak_scenario(p);
  const auto n_grid = grid_points(p, 1024);
  if (n_grid > kDefaultCapacity) throw CapacityError("pointer grid of " + std::to_string(n_grid) + " points exceeds capacity");
  const auto res = couple_and_postselect(s.ctx, s.observable, s.phi0, s.g);
  auto j = to_json(res);
  if (res.weak_value) {
    const auto lr = linear_response_report(s.ctx, s.observable, s.phi0, s.g);
    j.update(to_json(lr));
    j.update(to_json(validity_margin(s.ctx, s.observable, s.phi0, s.g)));
  }
  if (csv) *csv = grid_csv(res.pointer_final, n_grid);
  return j;
}

inline nlohmann::json run_qcc(const Params& p) { return to_json(run_ideal_qcc(qcc_config(p))); }

inline nlohmann::json run_qcc_joint(const Params& p, std::optional<std::string>* csv) {
  const auto n_grid = grid_points(p, 128);
  check_joint_grid(n_grid);
  const auto rep = run_joint_pointers(qcc_config(p));
  auto j = to_json(rep.report);
  j["postselect_prob_coupled"] = rep.postselect_prob_coupled;
  if (csv) {
    std::ostringstream os;
    joint_density_grid(rep.pointers, n_grid).write_csv(os);
    *csv = os.str();
  }
  return j;
}

inline nlohmann::json run_absorber(const Params& p) {
  return to_json(intensity_absorber({parse_arm(p.text("arm", "I")), p.number("M", 0.1)}));
}

inline nlohmann::json run_magnetic(const Params& p) {
  const MagneticConfig cfg{parse_arm(p.text("arm", "I")), p.number("alpha", 0.2)};
  auto j = to_json(intensity_magnetic(cfg));
  if (cfg.arm == Arm::I) j["systematic_term"] = to_json(systematic_term_report(cfg.alpha));
  return j;
}

inline nlohmann::json run_montecarlo(const Params& p, std::optional<std::string>* csv) {
  const auto n = static_cast<std::uint64_t>(p.number("n", 100000));
  const auto seed = static_cast<std::uint64_t>(p.number("seed", 1));
  const auto workers = static_cast<unsigned>(p.number("workers", default_workers()));
  const auto experiment = p.text("experiment", "weak");
  if (experiment == "absorber") {
    return to_json(sample_intensity_experiment(
        AbsorberConfig{parse_arm(p.text("arm", "I")), p.number("M", 0.1)}, n, seed, workers));
  }
  if (experiment == "magnetic") {
    return to_json(sample_intensity_experiment(
        MagneticConfig{parse_arm(p.text("arm", "I")), p.number("alpha", 0.2)}, n, seed, workers));
  }
  const auto s = weak_scenario(p);
  const auto batch = sample_trials(s.ctx, s.observable, s.phi0, s.g, n, seed, workers);
  nlohmann::json j;
  if (batch.n_postselected >= 2) {
    j = to_json(estimate_weak_value(batch, s.phi0, s.g));
  } else {
    j = {{"n_total", batch.n_total},
         {"n_postselected", batch.n_postselected},
         {"postselect_rate", static_cast<double>(batch.n_postselected) / static_cast<double>(batch.n_total)}};
  }
  j["postselect_prob_exact"] = batch.postselect_prob;
  j["seed"] = seed;
  if (csv) {
    std::ostringstream os;
    batch.write_csv(os);
    *csv = os.str();
  }
  return j;
}

inline nlohmann::json run_sweep(const std::map<std::string, std::string>& raw, std::string* csv_out) {
  auto params = raw;
  const auto scenario = params.at("scenario");
  params.erase("scenario");
  std::string key;
  SweepRange range{};
  for (const auto& [k, v] : params) {
    if (is_range(v)) {
      key = k;
      range = parse_range(k, v);
    }
  }
  const auto values = range.values();

  auto point = [&, scenario](double value) -> std::vector<double> {
    auto local = with_defaults(scenario, params);
    local[key] = format_double(value);
    const Params p(local);
    if (scenario == "qcc") {
      auto cfg = qcc_config(p);
      const auto r = run_ideal_qcc(cfg);
      return {value, r.wv_pi_I.real(), r.wv_sigma_I.real(), r.wv_pi_II.real(), r.wv_sigma_II.real(), r.shift_I,
              r.shift_II, r.postselect_prob};
    }
    if (scenario == "weak-value") {
      const auto s = weak_scenario(p);
      const auto lr = linear_response_report(s.ctx, s.observable, s.phi0, s.g);
      const auto vm = validity_margin(s.ctx, s.observable, s.phi0, s.g);
      return {value, lr.exact_shift, lr.predicted_shift, lr.abs_error, vm.margin};
    }
    if (scenario == "neutron-absorber") {
      const auto r = intensity_absorber({parse_arm(p.text("arm", "I")), p.number("M", 0.1)});
      return {value, r.ratio, r.first_order_prediction, r.inferred_weak_value, r.expansion_error};
    }
    const auto r = intensity_magnetic({parse_arm(p.text("arm", "I")), p.number("alpha", 0.2)});
    return {value, r.ratio, r.second_order_prediction, r.inferred_weak_value, r.expansion_error};
  };

  std::vector<std::future<std::vector<double>>> futures;
  for (double v : values) futures.push_back(std::async(std::launch::async, point, v));
  std::vector<std::vector<double>> rows;
  for (auto& f : futures) rows.push_back(f.get());

  std::vector<std::string> header;
  if (scenario == "qcc") {
    header = {"g", "wv_pi_I_re", "wv_sigma_I_re", "wv_pi_II_re", "wv_sigma_II_re", "shift_I", "shift_II",
              "postselect_prob"};
  } else if (scenario == "weak-value") {
    header = {"g", "exact_shift", "predicted_shift", "abs_error", "validity_margin"};
  } else {
    header = {"param", "ratio_exact", "ratio_predicted", "inferred_wv", "expansion_error"};
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  nlohmann::json jrows = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json jr;
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? "," : "") << format_double(row[i]);
      jr[header[i]] = row[i];
    }
    os << "\n";
    jrows.push_back(jr);
  }
  *csv_out = os.str();
  return {{"scenario", scenario}, {"swept", key}, {"rows", jrows}};
}

inline std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace detail

// Reads a flat JSON object of parameters. A "scenario" key is kept as a parameter.
inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigParseError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigParseError("config file must hold a flat object");
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : j.items()) {
    if (v.is_string()) {
      out[k] = v.get<std::string>();
    } else if (v.is_number_integer()) {
      out[k] = std::to_string(v.get<long long>());
    } else if (v.is_number()) {
      out[k] = format_double(v.get<double>());
    } else {
      throw ConfigParseError("config value for '" + k + "' must be a string or number");
    }
  }
  return out;
}

inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

// Validates, dispatches and assembles the run record.
inline RunResult run(const RunConfig& cfg) {
  const auto violations = validate(cfg);
  if (!violations.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& v : violations) msg += " " + v.field + " (" + v.constraint + ");";
    throw ValidationError(msg);
  }
  RunResult out;
  nlohmann::json results;
  const bool want_csv = cfg.out_csv.has_value();
  std::optional<std::string> csv;
  if (cfg.scenario == "sweep") {
    std::string s;
    results = detail::run_sweep(cfg.params, &s);
    csv = s;
  } else {
    const auto merged = detail::with_defaults(cfg.scenario, cfg.params);
    const detail::Params p(merged);
    if (cfg.scenario == "weak-value") results = detail::run_weak_value(p, want_csv ? &csv : nullptr);
    else if (cfg.scenario == "qcc") results = detail::run_qcc(p);
    else if (cfg.scenario == "qcc-joint") results = detail::run_qcc_joint(p, want_csv ? &csv : nullptr);
    else if (cfg.scenario == "neutron-absorber") results = detail::run_absorber(p);
    else if (cfg.scenario == "neutron-magnetic") results = detail::run_magnetic(p);
    else if (cfg.scenario == "montecarlo") results = detail::run_montecarlo(p, want_csv ? &csv : nullptr);
  }
  nlohmann::json config_echo = cfg.params;
  out.record = {{"scenario", cfg.scenario},
                {"config", config_echo},
                {"results", results},
                {"version", kVersion},
                {"timestamp", detail::timestamp_utc()}};
  out.csv = std::move(csv);
  return out;
}

// Relative output paths land in $QCCSIM_OUTPUT_DIR when it is set.
inline std::filesystem::path resolve_output(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) return std::filesystem::path(dir) / p;
  }
  return p;
}

inline nlohmann::json error_json(const Error& e, const std::vector<Violation>& violations = {}) {
  nlohmann::json j{{"error",
                    {{"kind", to_string(e.kind())}, {"message", e.what()}, {"exit_code", exit_code(e.kind())}}}};
  if (!violations.empty()) j["error"]["violations"] = detail::violations_json(violations);
  return j;
}

inline nlohmann::json validation_report(const RunConfig& cfg) {
  const auto v = validate(cfg);
  return {{"scenario", cfg.scenario}, {"valid", v.empty()}, {"violations", detail::violations_json(v)}};
}

}  // namespace qccsim::cli
