#pragma once

// Configuration-driven experiment runner: parses a JSON experiment document
// into validated objects, dispatches the task, and writes CSV/JSON outputs
// atomically. Exit codes: 0 ok, 2 config error, 3 precondition error,
// 4 verification failure, 5 kernel-bound violation.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stablelike/estimators.hpp"
#include "stablelike/geometry.hpp"
#include "stablelike/kernels.hpp"
#include "stablelike/sampler.hpp"

namespace stablelike {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitPreconditionError = 3;
inline constexpr int kExitVerificationFailure = 4;
inline constexpr int kExitKernelBoundViolation = 5;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kCsvSchemaVersion = "1";
inline constexpr const char* kSeedEnvVar = "STABLELIKE_MASTER_SEED";

struct ExperimentConfig {
  KernelPtr kernel;
  SimConfig sim;
  int workers = 1;
  std::string task_type;
  std::string csv_path;   // may be empty
  std::string json_path;  // may be empty
  std::string digest;     // canonical-config fingerprint, embedded in rows
  std::string raw_task_json;
};

// Parses and validates; throws ConfigError with a line/field diagnostic.
// The STABLELIKE_MASTER_SEED environment variable, when set, overrides
// sim.master_seed (and participates in the digest).
ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::string& origin = "<config>");

// Runs the task and writes outputs; prints a one-line summary per task to
// stdout. Returns a process exit code.
int run_experiment(const ExperimentConfig& config);

struct TaskInfo {
  std::string name;
  std::string summary;     // what the task estimates or checks
  std::string statement;   // the mathematical statement a verify task probes
  std::string parameters;  // parameter documentation
};

// Stable-ordered task catalog.
const std::vector<TaskInfo>& task_catalog();
int list_tasks(bool as_json, const std::string& filter);

}  // namespace stablelike
