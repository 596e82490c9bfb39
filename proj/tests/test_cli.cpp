#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "stablelike/errors.hpp"
#include "stablelike/experiment.hpp"
#include "stablelike/io.hpp"

using namespace stablelike;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string minimal_config(const fs::path& dir, int workers, std::uint64_t seed) {
  std::ostringstream cfg;
  cfg << R"({
  "kernel": {"family": "constant_stable", "d": 1, "alpha": 1.0, "normalization": "standard"},
  "sim": {"eps_cut": 0.01, "t_max": 10.0, "small_jump_mode": "drop", "master_seed": )"
      << seed << R"(},
  "workers": )" << workers << R"(,
  "output": {"csv": ")" << (dir / "out.csv").string() << R"(", "json": ")"
      << (dir / "out.json").string() << R"("},
  "task": {"type": "estimate.exit", "x0": [0.0],
           "domain": {"ball": {"center": [0.0], "radius": 1.0}}, "n": 400}
})";
  return cfg.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("stablelike_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(STABLELIKE_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("minimal config runs and writes one estimate row") {
  TempDir dir;
  const auto config = parse_experiment_config(minimal_config(dir.path, 1, 7));
  CHECK(run_experiment(config) == kExitOk);
  const std::string csv = slurp(dir.path / "out.csv");
  CHECK(csv.find("schema_version,task,estimator,params_digest") == 0);
  CHECK(csv.find("estimate.exit") != std::string::npos);
  CHECK(csv.find(config.digest) != std::string::npos);
  CHECK(csv.find(",7") != std::string::npos);  // master seed column
  // exactly header + one row
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  const std::string json = slurp(dir.path / "out.json");
  CHECK(json.find("\"estimator\": \"exit_time_mean\"") != std::string::npos);
}

TEST_CASE("rows are byte-identical for any worker count") {
  TempDir dir1, dir2;
  const auto serial = parse_experiment_config(minimal_config(dir1.path, 1, 99));
  const auto parallel = parse_experiment_config(minimal_config(dir2.path, 8, 99));
  REQUIRE(run_experiment(serial) == kExitOk);
  REQUIRE(run_experiment(parallel) == kExitOk);
  // outputs embed no worker count; only paths differ between the two configs
  const std::string a = slurp(dir1.path / "out.csv");
  const std::string b = slurp(dir2.path / "out.csv");
  CHECK(a.substr(a.find('\n')) == b.substr(b.find('\n')));
}

TEST_CASE("reruns overwrite stale output atomically") {
  TempDir dir;
  std::ofstream(dir.path / "out.csv") << "stale garbage";
  const auto config = parse_experiment_config(minimal_config(dir.path, 1, 7));
  REQUIRE(run_experiment(config) == kExitOk);
  const std::string csv = slurp(dir.path / "out.csv");
  CHECK(csv.find("stale") == std::string::npos);
  CHECK(csv.find("schema_version") == 0);
  CHECK_FALSE(fs::exists(dir.path / "out.csv.tmp"));
}

TEST_CASE("schema violations carry field diagnostics") {
  TempDir dir;
  std::string bad_alpha = minimal_config(dir.path, 1, 7);
  bad_alpha.replace(bad_alpha.find("\"alpha\": 1.0"), 12, "\"alpha\": 2.5");
  CHECK_THROWS_WITH_AS(parse_experiment_config(bad_alpha),
                       doctest::Contains("kernel.alpha"), ConfigError);

  std::string no_seed = minimal_config(dir.path, 1, 7);
  no_seed.replace(no_seed.find("\"master_seed\": 7"), 16, "\"gauss_dt\": 0.5");
  CHECK_THROWS_WITH_AS(parse_experiment_config(no_seed), doctest::Contains("master_seed"),
                       ConfigError);

  CHECK_THROWS_WITH_AS(parse_experiment_config("{\n  \"kernel\": oops\n}", "bad.json"),
                       doctest::Contains("bad.json:2"), ConfigError);

  std::string bad_task = minimal_config(dir.path, 1, 7);
  bad_task.replace(bad_task.find("estimate.exit"), 13, "estimate.wrong");
  CHECK_THROWS_WITH_AS(parse_experiment_config(bad_task), doctest::Contains("unknown task"),
                       ConfigError);
}

TEST_CASE("environment variable overrides only the master seed") {
  TempDir dir;
  ::setenv(kSeedEnvVar, "12345", 1);
  const auto config = parse_experiment_config(minimal_config(dir.path, 1, 7));
  ::unsetenv(kSeedEnvVar);
  CHECK(config.sim.master_seed == 12345);
  const auto plain = parse_experiment_config(minimal_config(dir.path, 1, 7));
  CHECK(plain.sim.master_seed == 7);
  CHECK(config.digest != plain.digest);  // the effective seed is in the digest
}

TEST_CASE("task catalog is stable and contains every verify suite") {
  const auto& catalog = task_catalog();
  std::vector<std::string> names;
  for (const auto& info : catalog) names.push_back(info.name);
  for (const char* expected : {"verify.scaling", "verify.hitting", "verify.support", "verify.phi",
                               "verify.mollify"}) {
    CHECK(std::find(names.begin(), names.end(), expected) != names.end());
  }
  // stable ordering: two calls agree
  const auto& again = task_catalog();
  REQUIRE(again.size() == catalog.size());
  for (std::size_t i = 0; i < catalog.size(); ++i) CHECK(again[i].name == catalog[i].name);
}

TEST_CASE("cli binary: exit codes for ok, config error, precondition error") {
  TempDir dir;
  const fs::path cfg_path = dir.path / "cfg.json";
  std::ofstream(cfg_path) << minimal_config(dir.path, 2, 3);
  CHECK(run_cli("run " + cfg_path.string()) == kExitOk);
  CHECK(run_cli("version") == kExitOk);
  CHECK(run_cli("list-tasks") == kExitOk);
  CHECK(run_cli("list-tasks --json") == kExitOk);
  CHECK(run_cli("list-tasks no.such.task") == kExitConfigError);
  CHECK(run_cli("run /no/such/config.json") == kExitConfigError);

  std::string bad = minimal_config(dir.path, 1, 3);
  bad.replace(bad.find("\"alpha\": 1.0"), 12, "\"alpha\": 2.5");
  const fs::path bad_path = dir.path / "bad.json";
  std::ofstream(bad_path) << bad;
  CHECK(run_cli("run " + bad_path.string()) == kExitConfigError);

  // start point on the boundary: precondition failure
  std::string degenerate = minimal_config(dir.path, 1, 3);
  degenerate.replace(degenerate.find("\"x0\": [0.0]"), 11, "\"x0\": [1.0]");
  const fs::path degenerate_path = dir.path / "degenerate.json";
  std::ofstream(degenerate_path) << degenerate;
  CHECK(run_cli("run " + degenerate_path.string()) == kExitPreconditionError);
}

TEST_CASE("cli binary: verification failures exit with the dedicated code") {
  TempDir dir;
  std::ostringstream cfg;
  cfg << R"({
  "kernel": {"family": "constant_stable", "d": 1, "alpha": 1.0, "normalization": "standard"},
  "sim": {"eps_cut": 0.01, "t_max": 1.0, "small_jump_mode": "drop", "master_seed": 4},
  "output": {"json": ")" << (dir.path / "v.json").string() << R"("},
  "task": {"type": "verify.support", "n": 300,
           "cases": [{"polyline": [[0.0, 0.0], [0.5, 0.0]], "eps": 3.0,
                      "designed_to_fail": true, "label": "mislabeled-wide-tube"}]}
})";
  const fs::path cfg_path = dir.path / "verify.json";
  std::ofstream(cfg_path) << cfg.str();
  CHECK(run_cli("run " + cfg_path.string()) == kExitVerificationFailure);
  const std::string json = slurp(dir.path / "v.json");
  CHECK(json.find("\"overall\": false") != std::string::npos);
}

TEST_CASE("every shipped example config parses and validates") {
  const fs::path dir = STABLELIKE_CONFIG_DIR;
  REQUIRE(fs::exists(dir));
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    ++count;
    INFO("config: ", entry.path().string());
    CHECK_NOTHROW(load_experiment_config(entry.path().string()));
  }
  CHECK(count == task_catalog().size());  // one exhaustive example per task
}
