// Command-line front end: run experiment configs, list the task catalog,
// print the version. Exit codes: 0 ok, 2 config error, 3 precondition error,
// 4 verification failure, 5 kernel-bound violation.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "stablelike/errors.hpp"
#include "stablelike/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"stablelike: Monte Carlo simulation and statistical verification "
               "for stable-like jump processes"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "run an experiment config");
  run_cmd->add_option("config", config_path, "path to a JSON experiment config")->required();

  bool tasks_json = false;
  std::string task_filter;
  auto* list_cmd = app.add_subcommand("list-tasks", "print the task catalog");
  list_cmd->add_flag("--json", tasks_json, "machine-readable catalog");
  list_cmd->add_option("task", task_filter, "show a single task");

  auto* version_cmd = app.add_subcommand("version", "print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : stablelike::kExitConfigError;
  }

  try {
    if (version_cmd->parsed()) {
      std::cout << "stablelike " << stablelike::kVersion << "\n";
      return stablelike::kExitOk;
    }
    if (list_cmd->parsed()) {
      return stablelike::list_tasks(tasks_json, task_filter);
    }
    const stablelike::ExperimentConfig config = stablelike::load_experiment_config(config_path);
    return stablelike::run_experiment(config);
  } catch (const stablelike::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return stablelike::kExitConfigError;
  } catch (const stablelike::KernelBoundViolation& e) {
    std::cerr << "kernel-bound violation: " << e.what() << "\n";
    return stablelike::kExitKernelBoundViolation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "precondition error: " << e.what() << "\n";
    return stablelike::kExitPreconditionError;
  } catch (const std::domain_error& e) {
    std::cerr << "precondition error: " << e.what() << "\n";
    return stablelike::kExitPreconditionError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return stablelike::kExitPreconditionError;
  }
}
