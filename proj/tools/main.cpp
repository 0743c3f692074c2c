#include <cstdint>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "esim/commands.hpp"
#include "esim/types.hpp"

namespace {

// CLI11 validator result convention: empty string means valid.
std::string check_policy(const std::string& value) {
  if (esim::parse_policy(value)) return {};
  return "unknown scheduler '" + value + "' (want min, max, moldable, or elastic)";
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> values;
  size_t start = 0;
  while (start <= list.size()) {
    size_t end = list.find(',', start);
    if (end == std::string::npos) end = list.size();
    std::string item = list.substr(start, end - start);
    if (item.empty()) throw CLI::ValidationError("--values", "empty entry in value list");
    if (item == "inf") {
      values.push_back(std::numeric_limits<double>::infinity());
    } else {
      size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(item, &used);
      } catch (const std::exception&) {
        throw CLI::ValidationError("--values", "not a number: '" + item + "'");
      }
      if (used != item.size())
        throw CLI::ValidationError("--values", "not a number: '" + item + "'");
      values.push_back(value);
    }
    start = end + 1;
  }
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator for elastic cluster scheduling"};
  app.require_subcommand(1);

  esim::RunOptions run;
  std::string run_policy;
  CLI::App* cmd_run = app.add_subcommand("run", "Simulate one workload");
  cmd_run->add_option("--config", run.config_path,
                      "Config file (JSON; built-in defaults when omitted)");
  cmd_run->add_option("--scheduler", run_policy,
                      "Override the configured policy: min, max, moldable, elastic")
      ->check(check_policy);
  cmd_run->add_option("--seed", run.seed, "Workload seed");
  cmd_run->add_option("--out", run.out_dir, "Output directory");

  esim::CompareOptions compare;
  CLI::App* cmd_compare =
      app.add_subcommand("compare", "Run all four policies on one workload");
  cmd_compare->add_option("--config", compare.config_path,
                          "Config file (JSON; built-in defaults when omitted)");
  cmd_compare->add_option("--seed", compare.seed, "Workload seed");
  cmd_compare->add_option("--out", compare.out_dir, "Output directory");

  esim::SweepOptions sweep;
  std::string sweep_variable;
  std::string sweep_values;
  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "Average metrics across seeds per swept value");
  cmd_sweep->add_option("--config", sweep.config_path,
                        "Config file (JSON; built-in defaults when omitted)");
  cmd_sweep
      ->add_option("--sweep", sweep_variable,
                   "Variable to sweep: submission-gap or rescale-gap")
      ->required()
      ->check([](const std::string& v) -> std::string {
        if (v == "submission-gap" || v == "rescale-gap") return {};
        return "unknown sweep variable '" + v + "'";
      });
  cmd_sweep
      ->add_option("--values", sweep_values,
                   "Comma-separated values, e.g. 0,60,120 (rescale-gap accepts inf)")
      ->required();
  cmd_sweep->add_option("--repeats", sweep.repeats,
                        "Seeds per value (default: generator.n_repeats)");
  cmd_sweep->add_option("--seed", sweep.base_seed, "Base seed");
  cmd_sweep->add_option("--out", sweep.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    int code = app.exit(err);
    return code == 0 ? esim::kExitOk : esim::kExitValidation;
  }

  if (cmd_run->parsed()) {
    if (!run_policy.empty()) run.scheduler = esim::parse_policy(run_policy);
    return esim::cmd_run(run);
  }
  if (cmd_compare->parsed()) return esim::cmd_compare(compare);
  if (cmd_sweep->parsed()) {
    sweep.sweep.variable = sweep_variable == "submission-gap"
                               ? esim::SweepVariable::SubmissionGap
                               : esim::SweepVariable::RescaleGap;
    try {
      sweep.sweep.values = parse_values(sweep_values);
    } catch (const CLI::ParseError& err) {
      return app.exit(err) == 0 ? esim::kExitOk : esim::kExitValidation;
    }
    return esim::cmd_sweep(sweep);
  }
  return esim::kExitValidation;
}
