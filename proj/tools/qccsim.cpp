// qccsim: command-line runner for the weak-measurement and Cheshire Cat scenarios.
//
//   qccsim <scenario> [--param value ...] [--config file.json] [--out report.json] [--csv data.csv]
//   qccsim validate <scenario> [--param value ...]
//
// Exit codes: 0 success, 2 config parse, 3 validation, 4 capacity, 5 numerical.

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qccsim/cli.hpp"

namespace {

using qccsim::cli::RunConfig;

struct ParamFlag {
  const char* name;
  const char* help;
};

const std::vector<ParamFlag>& param_flags() {
  static const std::vector<ParamFlag> flags{
      {"g", "coupling strength (time-integrated), sets both arms for qcc"},
      {"g-I", "coupling strength of the arm-I pointer"},
      {"g-II", "coupling strength of the arm-II pointer"},
      {"pointer-width", "pointer position spread sigma"},
      {"observable-I", "projector | sigma_x"},
      {"observable-II", "projector | sigma_x"},
      {"postselection", "standard | swapped"},
      {"context", "qcc | anomalous"},
      {"observable", "pi-I | pi-II | sigma-I | sigma-II (qcc), sigma-x | identity (anomalous)"},
      {"tan-theta", "postselection angle tangent of the anomalous context"},
      {"arm", "I | II"},
      {"M", "absorption coefficient"},
      {"alpha", "precession angle in radians"},
      {"experiment", "weak | absorber | magnetic (montecarlo)"},
      {"n", "number of trials"},
      {"seed", "64-bit seed"},
      {"workers", "worker threads"},
      {"scenario", "scenario to sweep"},
      {"grid-points", "points per axis of the pointer grid written with --csv"},
  };
  return flags;
}

struct Bound {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config_path;
  std::string out_json;
  std::string out_csv;
};

void bind(CLI::App* sub, Bound& b) {
  for (const auto& f : param_flags()) {
    b.options[f.name] = sub->add_option(std::string("--") + f.name, b.values[f.name], f.help);
  }
  sub->add_option("--config", b.config_path, "flat JSON config file; flags override its values");
  sub->add_option("--out", b.out_json, "JSON report path (default: stdout)");
  sub->add_option("--csv", b.out_csv, "CSV artifact path");
}

RunConfig collect(const std::string& scenario, const Bound& b) {
  RunConfig cfg;
  cfg.scenario = scenario;
  if (!b.config_path.empty()) {
    auto file = qccsim::cli::parse_config_file(b.config_path);
    if (auto it = file.find("scenario"); it != file.end() && scenario != "sweep") {
      if (it->second != scenario) throw qccsim::ConfigParseError("config file is for scenario '" + it->second + "'");
      file.erase(it);
    }
    cfg.params = std::move(file);
  }
  for (const auto& [name, opt] : b.options) {
    if (opt->count() > 0) cfg.params[name] = b.values.at(name);
  }
  if (!b.out_json.empty()) cfg.out_json = b.out_json;
  if (!b.out_csv.empty()) cfg.out_csv = b.out_csv;
  return cfg;
}

void write_file(const std::string& path, const std::string& content) {
  const auto resolved = qccsim::cli::resolve_output(path);
  std::ofstream out(resolved, std::ios::binary);
  if (!out) throw qccsim::ConfigParseError("cannot write output file '" + resolved.string() + "'");
  out << content;
}

int fail(const qccsim::Error& e, const std::vector<qccsim::cli::Violation>& v = {}) {
  std::cerr << qccsim::cli::error_json(e, v).dump() << "\n";
  return qccsim::exit_code(e.kind());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak-measurement and quantum Cheshire Cat simulator"};
  app.require_subcommand(1);

  std::map<std::string, Bound> bound;
  for (const auto& s : qccsim::cli::scenarios()) bind(app.add_subcommand(s, "run the " + s + " scenario"), bound[s]);
  auto* validate_cmd = app.add_subcommand("validate", "check a configuration without running it");
  std::string validate_scenario;
  validate_cmd->add_option("target", validate_scenario, "scenario to validate")->required();
  bind(validate_cmd, bound["validate"]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(qccsim::ConfigParseError(e.what()));
  }

  try {
    if (validate_cmd->parsed()) {
      const auto cfg = collect(validate_scenario, bound["validate"]);
      const auto report = qccsim::cli::validation_report(cfg);
      std::cout << report.dump(2) << "\n";
      return report.at("valid").get<bool>() ? 0 : qccsim::exit_code(qccsim::ErrorKind::Validation);
    }
    for (const auto& s : qccsim::cli::scenarios()) {
      if (!app.got_subcommand(s)) continue;
      const auto cfg = collect(s, bound[s]);
      if (const auto violations = qccsim::cli::validate(cfg); !violations.empty()) {
        return fail(qccsim::ValidationError("invalid configuration"), violations);
      }
      const auto result = qccsim::cli::run(cfg);
      const auto json_text = result.record.dump(2) + "\n";
      if (cfg.out_json) {
        write_file(*cfg.out_json, json_text);
      } else if (s != "sweep") {
        std::cout << json_text;
      }
      if (result.csv) {
        if (cfg.out_csv) {
          write_file(*cfg.out_csv, *result.csv);
        } else if (s == "sweep") {
          std::cout << *result.csv;
        }
      }
      return 0;
    }
  } catch (const qccsim::Error& e) {
    return fail(e);
  } catch (const std::exception& e) {
    return fail(qccsim::NumericalError(e.what()));
  }
  return 1;
}
