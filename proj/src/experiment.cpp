#include "stablelike/experiment.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "stablelike/errors.hpp"
#include "stablelike/io.hpp"
#include "stablelike/mollify.hpp"
#include "stablelike/oracles.hpp"
#include "stablelike/verify.hpp"

namespace stablelike {

using nlohmann::json;

namespace {

[[noreturn]] void fail_field(const std::string& field, const std::string& why) {
  throw ConfigError("config field '" + field + "': " + why);
}

const json& require(const json& obj, const std::string& key, const std::string& context) {
  if (!obj.is_object() || !obj.contains(key)) {
    fail_field(context + "." + key, "missing");
  }
  return obj.at(key);
}

double require_number(const json& obj, const std::string& key, const std::string& context) {
  const json& v = require(obj, key, context);
  if (!v.is_number()) fail_field(context + "." + key, "must be a number");
  return v.get<double>();
}

std::uint64_t require_uint(const json& obj, const std::string& key, const std::string& context) {
  const json& v = require(obj, key, context);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    fail_field(context + "." + key, "must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

Vec parse_vec(const json& v, int d, const std::string& context) {
  if (!v.is_array() || static_cast<int>(v.size()) != d) {
    fail_field(context, "must be an array of " + std::to_string(d) + " numbers");
  }
  Vec out = zero_vec();
  for (int i = 0; i < d; ++i) {
    if (!v[i].is_number()) fail_field(context, "must contain numbers only");
    out[i] = v[i].get<double>();
  }
  return out;
}

Region parse_region(const json& v, int d, const std::string& context) {
  if (v.is_object() && v.contains("ball")) {
    const json& b = v.at("ball");
    Ball ball;
    ball.center = parse_vec(require(b, "center", context + ".ball"), d, context + ".ball.center");
    ball.radius = require_number(b, "radius", context + ".ball");
    if (!(ball.radius > 0.0)) fail_field(context + ".ball.radius", "must be > 0");
    return ball;
  }
  if (v.is_object() && v.contains("cube")) {
    const json& c = v.at("cube");
    Cube cube;
    cube.center = parse_vec(require(c, "center", context + ".cube"), d, context + ".cube.center");
    cube.side = require_number(c, "side", context + ".cube");
    if (!(cube.side > 0.0)) fail_field(context + ".cube.side", "must be > 0");
    return cube;
  }
  fail_field(context, "must be an object with a 'ball' or 'cube' member");
}

RegionUnion parse_region_union(const json& v, int d, const std::string& context) {
  RegionUnion out;
  if (!v.is_array()) fail_field(context, "must be an array of regions");
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.members.push_back(parse_region(v[i], d, context + "[" + std::to_string(i) + "]"));
  }
  return out;
}

ScalarField parse_field(const json& v, int d, const std::string& context) {
  const json& type = require(v, "type", context);
  ScalarField field;
  if (type == "constant") {
    const double value = require_number(v, "value", context);
    field.f = [value](const Vec&) { return value; };
    field.sup_abs = std::abs(value);
    return field;
  }
  if (type == "indicator") {
    const RegionUnion region = parse_region_union(require(v, "region", context), d, context + ".region");
    field.f = [region, d](const Vec& x) { return region.contains(x, d) ? 1.0 : 0.0; };
    field.sup_abs = 1.0;
    return field;
  }
  if (type == "tent") {
    const Vec center = parse_vec(require(v, "center", context), d, context + ".center");
    const double radius = require_number(v, "radius", context);
    if (!(radius > 0.0)) fail_field(context + ".radius", "must be > 0");
    field.f = [center, radius, d](const Vec& x) {
      return std::max(0.0, 1.0 - dist(x, center, d) / radius);
    };
    field.sup_abs = 1.0;
    return field;
  }
  fail_field(context + ".type", "must be one of constant|indicator|tent");
}

Polyline parse_polyline(const json& v, int d, const std::string& context) {
  if (!v.is_array() || v.size() < 2) fail_field(context, "must be an array of [t, x...] vertices");
  std::vector<PolylineVertex> vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& entry = v[i];
    if (!entry.is_array() || static_cast<int>(entry.size()) != d + 1) {
      fail_field(context, "vertices must be arrays [t, x_1..x_d]");
    }
    PolylineVertex vert;
    vert.t = entry[0].get<double>();
    for (int k = 0; k < d; ++k) vert.x[k] = entry[k + 1].get<double>();
    vertices.push_back(vert);
  }
  try {
    return Polyline(std::move(vertices));
  } catch (const std::exception& e) {
    fail_field(context, e.what());
  }
}

KernelPtr parse_kernel(const json& k) {
  const std::string family = require(k, "family", "kernel").get<std::string>();
  const int d = static_cast<int>(require_uint(k, "d", "kernel"));
  const double alpha = require_number(k, "alpha", "kernel");
  if (!(alpha > 0.0 && alpha < 2.0)) fail_field("kernel.alpha", "must be in (0,2)");
  std::optional<double> kappa;
  if (k.contains("kappa")) kappa = require_number(k, "kappa", "kernel");
  std::optional<double> eta;
  if (k.contains("eta")) eta = require_number(k, "eta", "kernel");
  try {
    if (family == "constant_stable") {
      double c;
      if (k.contains("normalization") && k.at("normalization") == "standard") {
        c = stable_normalization(d, alpha);
      } else {
        c = require_number(k, "c", "kernel");
      }
      return std::make_shared<ConstantStableKernel>(d, alpha, c, kappa, eta);
    }
    if (family == "modulated") {
      const double a = require_number(k, "a", "kernel");
      const double omega = k.contains("omega") ? require_number(k, "omega", "kernel") : 3.0;
      return std::make_shared<ModulatedKernel>(d, alpha, a, omega, kappa, eta);
    }
    if (family == "anisotropic") {
      const double b = require_number(k, "b", "kernel");
      if (!(std::abs(b) < 1.0)) fail_field("kernel.b", "must satisfy |b| < 1");
      const double g_max = 1.0 + std::abs(b) * (1.0 - 1.0 / d);
      const double g_min = 1.0 - std::abs(b) / d;
      const double kap = kappa.value_or(std::min(g_min, 1.0 / g_max));
      auto g = [b, d](const Vec&, const Vec& u) {
        return 1.0 + b * (u[0] * u[0] - 1.0 / d);
      };
      return std::make_shared<AnisotropicKernel>(d, alpha, g, kap, eta);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("kernel: ") + e.what());
  }
  fail_field("kernel.family", "must be one of constant_stable|modulated|anisotropic");
}

SimConfig parse_sim(const json& s, const std::string& context) {
  SimConfig cfg;
  cfg.eps_cut = require_number(s, "eps_cut", context);
  cfg.t_max = require_number(s, "t_max", context);
  const std::string mode = require(s, "small_jump_mode", context).get<std::string>();
  if (mode == "drop") {
    cfg.small_jump_mode = SmallJumpMode::kDrop;
  } else if (mode == "gauss") {
    cfg.small_jump_mode = SmallJumpMode::kGauss;
  } else {
    fail_field(context + ".small_jump_mode", "must be drop|gauss");
  }
  cfg.gauss_dt = s.contains("gauss_dt") ? require_number(s, "gauss_dt", context) : 0.01;
  if (!s.contains("master_seed")) {
    fail_field(context + ".master_seed", "missing (wall-clock seeding is not supported)");
  }
  cfg.master_seed = require_uint(s, "master_seed", context);
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    fail_field(context, e.what());
  }
  return cfg;
}

SimConfig parse_sim_overrides(const SimConfig& base, const json& s, const std::string& context) {
  SimConfig cfg = base;
  if (s.contains("eps_cut")) cfg.eps_cut = require_number(s, "eps_cut", context);
  if (s.contains("t_max")) cfg.t_max = require_number(s, "t_max", context);
  if (s.contains("gauss_dt")) cfg.gauss_dt = require_number(s, "gauss_dt", context);
  if (s.contains("small_jump_mode")) {
    const std::string mode = s.at("small_jump_mode").get<std::string>();
    if (mode == "drop") {
      cfg.small_jump_mode = SmallJumpMode::kDrop;
    } else if (mode == "gauss") {
      cfg.small_jump_mode = SmallJumpMode::kGauss;
    } else {
      fail_field(context + ".small_jump_mode", "must be drop|gauss");
    }
  }
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    fail_field(context, e.what());
  }
  return cfg;
}

std::string method_name(CiMethod m) { return m == CiMethod::kClt ? "clt" : "wilson"; }

CsvTable estimate_csv(const ExperimentConfig& config, const std::string& estimator,
                      const EstimateWithCI& est) {
  CsvTable table;
  table.header = {"schema_version", "task",      "estimator", "params_digest", "master_seed",
                  "mean",           "std_error", "n_samples", "method",        "bias_bound"};
  table.rows.push_back({kCsvSchemaVersion, config.task_type, estimator, config.digest,
                        std::to_string(config.sim.master_seed), format_double(est.mean),
                        format_double(est.std_error), std::to_string(est.n_samples),
                        method_name(est.method), format_double(est.bias_bound)});
  return table;
}

json estimate_json(const ExperimentConfig& config, const std::string& estimator,
                   const EstimateWithCI& est) {
  json doc;
  doc["task"] = config.task_type;
  doc["estimator"] = estimator;
  doc["params_digest"] = config.digest;
  doc["master_seed"] = config.sim.master_seed;
  doc["mean"] = est.mean;
  doc["std_error"] = est.std_error;
  doc["n_samples"] = est.n_samples;
  doc["method"] = method_name(est.method);
  doc["bias_bound"] = est.bias_bound;
  doc["ci95"] = {est.ci_low(), est.ci_high()};
  return doc;
}

void write_outputs(const ExperimentConfig& config, const CsvTable& csv, const json& doc) {
  if (!config.csv_path.empty()) write_file_atomic(config.csv_path, csv.to_string());
  if (!config.json_path.empty()) write_file_atomic(config.json_path, doc.dump(2) + "\n");
}

int finish_estimate(const ExperimentConfig& config, const std::string& estimator,
                    const EstimateWithCI& est) {
  write_outputs(config, estimate_csv(config, estimator, est), estimate_json(config, estimator, est));
  std::cout << config.task_type << ": mean=" << format_double(est.mean)
            << " se=" << format_double(est.std_error) << " n=" << est.n_samples
            << " bias_bound=" << format_double(est.bias_bound) << " digest=" << config.digest
            << "\n";
  return kExitOk;
}

int finish_verification(const ExperimentConfig& config, const VerificationResult& result,
                        CsvTable raw) {
  json doc = json::parse(result.to_json());
  doc["task"] = config.task_type;
  doc["config_digest"] = config.digest;
  write_outputs(config, raw, doc);
  std::size_t passed = 0;
  for (const auto& c : result.checks) passed += c.pass ? 1 : 0;
  std::cout << config.task_type << ": " << (result.overall ? "PASS" : "FAIL") << " (" << passed
            << "/" << result.checks.size() << " checks) digest=" << config.digest << "\n";
  return result.overall ? kExitOk : kExitVerificationFailure;
}

CsvTable verification_csv(const ExperimentConfig& config, const VerificationResult& result) {
  CsvTable table;
  table.header = {"schema_version", "task",      "label",     "mean",       "std_error",
                  "n_samples",      "method",    "bias_bound", "params_digest", "master_seed"};
  for (const auto& row : result.raw_csv_rows()) {
    table.rows.push_back({kCsvSchemaVersion, config.task_type, row[0], row[1], row[2], row[3],
                          row[4], row[5], result.params_digest,
                          std::to_string(config.sim.master_seed)});
  }
  return table;
}

int run_simulate(const ExperimentConfig& config, const json& task) {
  const int d = config.kernel->bounds().d;
  const Vec x0 = parse_vec(require(task, "x0", "task"), d, "task.x0");
  const std::uint64_t paths = require_uint(task, "paths", "task");
  if (paths == 0) fail_field("task.paths", "must be >= 1");
  CsvTable table;
  table.header = {"schema_version", "path", "event", "t"};
  for (int i = 0; i < d; ++i) table.header.push_back("x" + std::to_string(i));
  std::uint64_t total_events = 0;
  for (std::uint64_t p = 0; p < paths; ++p) {
    const PathSkeleton path = simulate_path(*config.kernel, x0, config.sim, p);
    total_events += path.events.size();
    for (std::size_t e = 0; e < path.events.size(); ++e) {
      std::vector<std::string> row = {kCsvSchemaVersion, std::to_string(p), std::to_string(e),
                                      format_double(path.events[e].t)};
      for (int i = 0; i < d; ++i) row.push_back(format_double(path.events[e].x[i]));
      table.rows.push_back(std::move(row));
    }
  }
  json doc;
  doc["task"] = config.task_type;
  doc["paths"] = paths;
  doc["total_events"] = total_events;
  doc["params_digest"] = config.digest;
  doc["master_seed"] = config.sim.master_seed;
  write_outputs(config, table, doc);
  std::cout << config.task_type << ": paths=" << paths << " events=" << total_events
            << " digest=" << config.digest << "\n";
  return kExitOk;
}

int run_mollify_build(const ExperimentConfig& config, const json& task) {
  const int d = config.kernel->bounds().d;
  const Vec x0 = parse_vec(require(task, "x0", "task"), d, "task.x0");
  const double lambda = require_number(task, "lambda", "task");
  const std::uint64_t m = require_uint(task, "m", "task");
  SimConfig mu_cfg = config.sim;
  if (task.contains("mu_sim")) mu_cfg = parse_sim_overrides(config.sim, task.at("mu_sim"), "task.mu_sim");
  const OccupationMeasure mu = estimate_mu(*config.kernel, x0, lambda, mu_cfg, m, config.workers);

  CsvTable table;
  table.header = {"schema_version", "probe", "mu_hat", "paths_charging", "params_digest",
                  "master_seed"};
  if (task.contains("probe_regions")) {
    const json& probes = task.at("probe_regions");
    if (!probes.is_array()) fail_field("task.probe_regions", "must be an array");
    for (std::size_t i = 0; i < probes.size(); ++i) {
      RegionUnion probe;
      probe.members.push_back(parse_region(probes[i], d, "task.probe_regions"));
      const auto [hits, total] = mu.paths_charging(probe);
      (void)total;
      table.rows.push_back({kCsvSchemaVersion, std::to_string(i), format_double(mu.measure(probe)),
                            std::to_string(hits), config.digest,
                            std::to_string(config.sim.master_seed)});
    }
  }
  json doc;
  doc["task"] = config.task_type;
  doc["lambda"] = lambda;
  doc["paths"] = mu.path_count();
  doc["atoms"] = mu.atom_count();
  doc["total_mass"] = mu.total_mass;
  doc["tail_bound"] = mu.tail_bound();
  doc["params_digest"] = config.digest;
  doc["master_seed"] = config.sim.master_seed;
  write_outputs(config, table, doc);
  std::cout << config.task_type << ": atoms=" << mu.atom_count()
            << " total_mass=" << format_double(mu.total_mass)
            << " tail_bound=" << format_double(mu.tail_bound()) << " digest=" << config.digest
            << "\n";
  return kExitOk;
}

int run_verify_mollify(const ExperimentConfig& config, const json& task) {
  const int d = config.kernel->bounds().d;
  MollifyPipelineParams params;
  params.x0 = parse_vec(require(task, "x0", "task"), d, "task.x0");
  params.f = parse_field(require(task, "field", "task"), d, "task.field");
  params.lambda = require_number(task, "lambda", "task");
  if (task.contains("eps_list")) {
    params.eps_list.clear();
    for (const auto& e : task.at("eps_list")) params.eps_list.push_back(e.get<double>());
  }
  params.n_paths = require_uint(task, "n", "task");
  params.m_paths = require_uint(task, "m", "task");
  params.resolvent_cfg = config.sim;
  params.mu_cfg = task.contains("mu_sim")
                      ? parse_sim_overrides(config.sim, task.at("mu_sim"), "task.mu_sim")
                      : config.sim;
  const MollifyPipelineResult result = verify_mollify_pipeline(config.kernel, params, config.workers);

  CsvTable table;
  table.header = {"table", "eps", "estimate", "reference", "abs_error", "combined_se",
                  "support_failure_fraction"};
  for (const auto& row : result.resolvent_rows) {
    table.rows.push_back({"resolvent", format_double(row.eps), format_double(row.estimate),
                          format_double(row.reference), format_double(row.abs_error),
                          format_double(row.combined_se),
                          format_double(row.support_failure_fraction)});
  }
  for (const auto& row : result.kernel_rows) {
    table.rows.push_back({"kernel", format_double(row.eps), format_double(row.sup_error), "0",
                          format_double(row.sup_error), format_double(row.se_at_argmax),
                          format_double(row.support_failure_fraction)});
  }
  json doc = json::parse(result.result.to_json());
  doc["task"] = config.task_type;
  doc["config_digest"] = config.digest;
  write_outputs(config, table, doc);
  std::size_t passed = 0;
  for (const auto& c : result.result.checks) passed += c.pass ? 1 : 0;
  std::cout << config.task_type << ": " << (result.result.overall ? "PASS" : "FAIL") << " ("
            << passed << "/" << result.result.checks.size() << " checks) digest=" << config.digest
            << "\n";
  return result.result.overall ? kExitOk : kExitVerificationFailure;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    // count the line of the failure byte for the diagnostic
    std::size_t line = 1;
    for (std::size_t i = 0; i < e.byte && i < json_text.size(); ++i) {
      if (json_text[i] == '\n') ++line;
    }
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + e.what());
  }
  ExperimentConfig config;
  config.kernel = parse_kernel(require(doc, "kernel", "config"));
  config.sim = parse_sim(require(doc, "sim", "config"), "sim");
  if (const char* env_seed = std::getenv(kSeedEnvVar)) {
    try {
      config.sim.master_seed = std::stoull(env_seed);
    } catch (const std::exception&) {
      throw ConfigError(std::string(kSeedEnvVar) + ": not a valid unsigned integer");
    }
  }
  config.workers = 1;
  if (doc.contains("workers")) {
    const auto w = require_uint(doc, "workers", "config");
    if (w == 0 || w > 1024) fail_field("workers", "must be in [1, 1024]");
    config.workers = static_cast<int>(w);
  }
  if (doc.contains("output")) {
    const json& out = doc.at("output");
    if (out.contains("csv")) config.csv_path = out.at("csv").get<std::string>();
    if (out.contains("json")) config.json_path = out.at("json").get<std::string>();
  }
  const json& task = require(doc, "task", "config");
  config.task_type = require(task, "type", "task").get<std::string>();
  config.raw_task_json = task.dump();

  // canonical digest: kernel + sim + task with the effective seed substituted;
  // worker count and output paths are execution plumbing and stay out so that
  // reruns on different machines produce identical rows
  json canonical;
  canonical["kernel"] = doc.at("kernel");
  canonical["sim"] = doc.at("sim");
  canonical["sim"]["master_seed"] = config.sim.master_seed;
  canonical["task"] = task;
  config.digest = digest_hex(canonical.dump());

  bool known = false;
  for (const auto& info : task_catalog()) known = known || info.name == config.task_type;
  if (!known) fail_field("task.type", "unknown task '" + config.task_type + "'");
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str(), path);
}

int run_experiment(const ExperimentConfig& config) {
  const json task = json::parse(config.raw_task_json);
  const int d = config.kernel->bounds().d;
  const int workers = config.workers;

  if (config.task_type == "simulate") return run_simulate(config, task);

  if (config.task_type == "estimate.exit") {
    const Vec x0 = parse_vec(require(task, "x0", "task"), d, "task.x0");
    const Region domain = parse_region(require(task, "domain", "task"), d, "task.domain");
    const std::uint64_t n = require_uint(task, "n", "task");
    return finish_estimate(config, "exit_time_mean",
                           exit_time_mean(*config.kernel, x0, domain, config.sim, n, workers));
  }
  if (config.task_type == "estimate.hit") {
    const Vec y = parse_vec(require(task, "y", "task"), d, "task.y");
    const RegionUnion A = parse_region_union(require(task, "target", "task"), d, "task.target");
    const Region container = parse_region(require(task, "container", "task"), d, "task.container");
    const std::uint64_t n = require_uint(task, "n", "task");
    return finish_estimate(config, "hitting_probability",
                           hitting_probability(*config.kernel, y, A, container, config.sim, n,
                                               workers));
  }
  if (config.task_type == "estimate.occupation") {
    const Vec x0 = parse_vec(require(task, "x0", "task"), d, "task.x0");
    const RegionUnion B = parse_region_union(require(task, "B", "task"), d, "task.B");
    const Region domain = parse_region(require(task, "domain", "task"), d, "task.domain");
    const std::uint64_t n = require_uint(task, "n", "task");
    return finish_estimate(config, "occupation_time",
                           occupation_time(*config.kernel, x0, B, domain, config.sim, n, workers));
  }
  if (config.task_type == "estimate.tube") {
    const Polyline phi = parse_polyline(require(task, "polyline", "task"), d, "task.polyline");
    const double eps = require_number(task, "eps", "task");
    const std::uint64_t n = require_uint(task, "n", "task");
    return finish_estimate(config, "tube_probability",
                           tube_probability(*config.kernel, phi, eps, config.sim, n, workers));
  }
  if (config.task_type == "estimate.resolvent") {
    const Vec x0 = parse_vec(require(task, "x0", "task"), d, "task.x0");
    const ScalarField f = parse_field(require(task, "field", "task"), d, "task.field");
    const double lambda = require_number(task, "lambda", "task");
    const std::uint64_t n = require_uint(task, "n", "task");
    return finish_estimate(config, "resolvent",
                           resolvent(*config.kernel, x0, f, lambda, config.sim, n, workers));
  }

  if (config.task_type == "verify.scaling") {
    std::vector<double> r_list;
    for (const auto& r : require(task, "r_list", "task")) r_list.push_back(r.get<double>());
    const std::uint64_t n = require_uint(task, "n", "task");
    const VerificationResult result =
        verify_exit_scaling(config.kernel, r_list, config.sim, n, workers);
    return finish_verification(config, result, verification_csv(config, result));
  }
  if (config.task_type == "verify.hitting") {
    const Vec center = parse_vec(require(task, "center", "task"), d, "task.center");
    std::vector<RegionUnion> A_list;
    for (const auto& r : require(task, "target_radii", "task")) {
      RegionUnion A;
      A.members.push_back(Ball{center, r.get<double>()});
      A_list.push_back(A);
    }
    std::vector<Vec> y_list;
    for (const auto& y : require(task, "starts", "task")) {
      y_list.push_back(parse_vec(y, d, "task.starts"));
    }
    const std::uint64_t n = require_uint(task, "n", "task");
    const VerificationResult result =
        verify_hitting_bound(config.kernel, center, A_list, y_list, config.sim, n, workers);
    return finish_verification(config, result, verification_csv(config, result));
  }
  if (config.task_type == "verify.support") {
    std::vector<SupportCase> cases;
    for (const auto& c : require(task, "cases", "task")) {
      SupportCase sc{parse_polyline(require(c, "polyline", "task.cases"), d, "task.cases.polyline"),
                     require_number(c, "eps", "task.cases"), config.sim, false, "case"};
      if (c.contains("designed_to_fail")) sc.designed_to_fail = c.at("designed_to_fail").get<bool>();
      if (c.contains("label")) sc.label = c.at("label").get<std::string>();
      if (c.contains("sim")) sc.cfg = parse_sim_overrides(config.sim, c.at("sim"), "task.cases.sim");
      cases.push_back(std::move(sc));
    }
    const std::uint64_t n = require_uint(task, "n", "task");
    const VerificationResult result = verify_support_theorem(config.kernel, cases, n, workers);
    return finish_verification(config, result, verification_csv(config, result));
  }
  if (config.task_type == "verify.phi") {
    std::vector<double> grid;
    for (const auto& e : require(task, "measure_grid", "task")) grid.push_back(e.get<double>());
    const int sets = static_cast<int>(require_uint(task, "random_set_count", "task"));
    const std::uint64_t n = require_uint(task, "n", "task");
    const PhiEnvelopeResult result =
        estimate_phi_envelope(config.kernel, grid, sets, config.sim, n, workers);
    CsvTable raw = verification_csv(config, result.result);
    return finish_verification(config, result.result, std::move(raw));
  }
  if (config.task_type == "verify.mollify") return run_verify_mollify(config, task);
  if (config.task_type == "mollify.build") return run_mollify_build(config, task);

  throw ConfigError("unknown task type: " + config.task_type);
}

const std::vector<TaskInfo>& task_catalog() {
  static const std::vector<TaskInfo> catalog = {
      {"simulate", "write raw path skeletons for inspection",
       "piecewise-constant paths of the jump process with truncated kernel",
       "x0, paths; kernel+sim sections"},
      {"estimate.exit", "mean exit time from a ball or cube",
       "E^x tau_D for the stable-like process (finite, scales like r^alpha)",
       "x0, domain, n"},
      {"estimate.hit", "probability of hitting a target before leaving a container",
       "P^y(T_A < tau_container) > 0 with a lower bound proportional to |A|",
       "y, target (region list), container, n"},
      {"estimate.occupation", "expected time spent in B before exiting the domain",
       "E^x int_0^tau 1_B(X_s) ds >= phi(|B|) > 0 for |B| > 0",
       "x0, B (region list), domain, n"},
      {"estimate.tube", "probability the path stays within eps of a polyline",
       "P(sup_{s<=t0} |X_s - phi(s)| < eps) > 0 for any continuous phi",
       "polyline ([[t,x...],...]), eps, n"},
      {"estimate.resolvent", "lambda-discounted expected occupation functional",
       "S_lambda f(x) = E^x int_0^inf exp(-lambda t) f(X_t) dt",
       "x0, field (constant|indicator|tent), lambda, n"},
      {"verify.scaling", "exit-time scaling suite",
       "E tau(ball(0,r)) / r^alpha is constant in r for constant kernels",
       "r_list, n"},
      {"verify.hitting", "hitting lower-bound suite",
       "P^y(T_A < tau_ball(x,3)) stays bounded below in proportion to |A|",
       "center, target_radii (nested), starts, n"},
      {"verify.support", "path tube positivity suite",
       "tubes around continuous curves carry positive probability",
       "cases ({polyline, eps, designed_to_fail?, label?, sim?}), n"},
      {"verify.phi", "occupation lower-envelope suite",
       "occupation of B in Q(0,1) from Q(0,1/2) is bounded below by a "
       "nondecreasing envelope of |B|",
       "measure_grid, random_set_count, n"},
      {"verify.mollify", "mollified-kernel pipeline suite",
       "smoothed kernels keep the stable bounds and their resolvents and "
       "intensities converge to the base as eps -> 0",
       "x0, field, lambda, eps_list, n, m, mu_sim?"},
      {"mollify.build", "build and summarize a discounted occupation ensemble",
       "mu(C) = E int_0^inf exp(-lambda t) 1_C(X_t) dt as weighted path atoms",
       "x0, lambda, m, probe_regions?, mu_sim?"},
  };
  return catalog;
}

int list_tasks(bool as_json, const std::string& filter) {
  const auto& catalog = task_catalog();
  if (!filter.empty()) {
    bool found = false;
    for (const auto& info : catalog) found = found || info.name == filter;
    if (!found) {
      std::cerr << "unknown task: " << filter << "\n";
      return kExitConfigError;
    }
  }
  if (as_json) {
    json doc = json::array();
    for (const auto& info : catalog) {
      if (!filter.empty() && info.name != filter) continue;
      doc.push_back({{"name", info.name},
                     {"summary", info.summary},
                     {"statement", info.statement},
                     {"parameters", info.parameters}});
    }
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
  }
  for (const auto& info : catalog) {
    if (!filter.empty() && info.name != filter) continue;
    std::cout << info.name << "\n  " << info.summary << "\n  checks: " << info.statement
              << "\n  parameters: " << info.parameters << "\n";
  }
  return kExitOk;
}

}  // namespace stablelike
