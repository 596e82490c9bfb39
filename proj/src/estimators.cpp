#include "stablelike/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stablelike/parallel.hpp"

namespace stablelike {

namespace {

constexpr double kZ95 = 1.959963984540054;

double gauss_grid_bias(const SimConfig& cfg) {
  return cfg.small_jump_mode == SmallJumpMode::kGauss ? cfg.gauss_dt : 0.0;
}

}  // namespace

double EstimateWithCI::ci_low() const {
  if (method == CiMethod::kWilson) {
    const auto successes = static_cast<std::uint64_t>(std::llround(mean * n_samples));
    return wilson_interval(successes, n_samples).first;
  }
  return mean - kZ95 * std_error;
}

double EstimateWithCI::ci_high() const {
  if (method == CiMethod::kWilson) {
    const auto successes = static_cast<std::uint64_t>(std::llround(mean * n_samples));
    return wilson_interval(successes, n_samples).second;
  }
  return mean + kZ95 * std_error;
}

std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("wilson_interval: n must be > 0");
  const double p = static_cast<double>(successes) / static_cast<double>(n);
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      kZ95 / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * static_cast<double>(n) * n));
  // the bound is exactly 0 (resp. 1) at the degenerate counts; keep it free of
  // round-off so positivity checks mean "at least one hit"
  const double low = successes == 0 ? 0.0 : std::max(0.0, center - half);
  const double high = successes == n ? 1.0 : std::min(1.0, center + half);
  return {low, high};
}

EstimateWithCI summarize_clt(const std::vector<double>& values, double bias_bound) {
  if (values.size() < 2) throw std::invalid_argument("summarize_clt: need at least 2 samples");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double n = static_cast<double>(values.size());
  EstimateWithCI est;
  est.mean = mean;
  est.std_error = std::sqrt(ss / (n * (n - 1.0)));
  est.n_samples = values.size();
  est.method = CiMethod::kClt;
  est.bias_bound = bias_bound;
  return est;
}

EstimateWithCI summarize_wilson(std::uint64_t successes, std::uint64_t n, double bias_bound) {
  if (n == 0) throw std::invalid_argument("summarize_wilson: n must be > 0");
  EstimateWithCI est;
  est.mean = static_cast<double>(successes) / static_cast<double>(n);
  est.std_error = std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(n));
  est.n_samples = n;
  est.method = CiMethod::kWilson;
  est.bias_bound = bias_bound;
  return est;
}

double path_exit_time(const PathSkeleton& path, const ExitRecord& exit) {
  return exit.exited ? exit.exit_time : path.horizon;
}

double path_occupation(const PathSkeleton& path, const RegionUnion& B, int d) {
  if (B.empty()) return 0.0;
  double outside = 0.0;
  double t_prev = 0.0;
  const Vec* pos = &path.start;
  for (const auto& ev : path.events) {
    if (!B.contains(*pos, d)) outside += ev.t - t_prev;
    t_prev = ev.t;
    pos = &ev.x;
  }
  if (t_prev < path.horizon && !B.contains(*pos, d)) outside += path.horizon - t_prev;
  return path.horizon - outside;
}

namespace {

// max over s in [s0, s1] of |c - phi(s)|; |c - phi(s)| is convex in s on each
// linear piece, so the maximum sits at a piece endpoint.
double max_dist_on_interval(const Vec& c, const Polyline& phi, double s0, double s1, int d) {
  double best = std::max(dist(c, phi.value(s0, d), d), dist(c, phi.value(s1, d), d));
  for (const auto& v : phi.vertices()) {
    if (v.t > s0 && v.t < s1) best = std::max(best, dist(c, v.x, d));
  }
  return best;
}

}  // namespace

double path_tube_sup(const PathSkeleton& path, const Polyline& phi, int d) {
  const double t_end = std::min(path.horizon, phi.duration());
  double sup = 0.0;
  double t_prev = 0.0;
  const Vec* pos = &path.start;
  for (const auto& ev : path.events) {
    if (t_prev >= t_end) break;
    const double hi = std::min(ev.t, t_end);
    if (hi > t_prev) sup = std::max(sup, max_dist_on_interval(*pos, phi, t_prev, hi, d));
    t_prev = ev.t;
    pos = &ev.x;
  }
  if (t_prev < t_end) sup = std::max(sup, max_dist_on_interval(*pos, phi, t_prev, t_end, d));
  return sup;
}

double path_resolvent(const PathSkeleton& path, const ScalarField& f, double lambda, int d) {
  (void)d;
  double acc = 0.0;
  double discount_prev = 1.0;  // exp(-lambda * 0)
  double t_prev = 0.0;
  const Vec* pos = &path.start;
  for (const auto& ev : path.events) {
    const double discount = std::exp(-lambda * ev.t);
    acc += f.f(*pos) * (discount_prev - discount) / lambda;
    discount_prev = discount;
    t_prev = ev.t;
    pos = &ev.x;
  }
  if (t_prev < path.horizon) {
    acc += f.f(*pos) * (discount_prev - std::exp(-lambda * path.horizon)) / lambda;
  }
  return acc;
}

bool path_hits_before_exit(const PathSkeleton& path, const ExitRecord& exit, const RegionUnion& A,
                           int d) {
  if (A.empty()) return false;
  if (A.contains(path.start, d)) return true;
  for (const auto& ev : path.events) {
    if (exit.exited && ev.t >= exit.exit_time) break;
    if (A.contains(ev.x, d)) return true;
  }
  return false;
}

std::vector<double> exit_time_samples(const JumpKernel& kernel, const Vec& x0,
                                      const Region& domain, const SimConfig& cfg,
                                      std::uint64_t n_paths, int workers) {
  std::vector<double> values(n_paths);
  parallel_for(n_paths, workers, [&](std::size_t i) {
    values[i] = simulate_exit_only(kernel, x0, domain, cfg, i).exit_time;
  });
  return values;
}

EstimateWithCI exit_time_mean(const JumpKernel& kernel, const Vec& x0, const Region& domain,
                              const SimConfig& cfg, std::uint64_t n_paths, int workers) {
  if (n_paths < 2) throw std::invalid_argument("exit_time_mean: need N >= 2");
  std::vector<double> values(n_paths);
  std::vector<std::uint8_t> censored(n_paths);
  parallel_for(n_paths, workers, [&](std::size_t i) {
    const ExitRecord exit = simulate_exit_only(kernel, x0, domain, cfg, i);
    values[i] = exit.exit_time;
    censored[i] = exit.exited ? 0 : 1;
  });
  std::uint64_t unexited = 0;
  for (auto c : censored) unexited += c;
  const double censor_bias =
      static_cast<double>(unexited) / static_cast<double>(n_paths) * cfg.t_max;
  return summarize_clt(values, censor_bias + gauss_grid_bias(cfg));
}

EstimateWithCI hitting_probability(const JumpKernel& kernel, const Vec& y, const RegionUnion& A,
                                   const Region& container, const SimConfig& cfg,
                                   std::uint64_t n_paths, int workers) {
  const int d = kernel.bounds().d;
  if (!strictly_inside(container, y, d)) {
    throw std::invalid_argument("hitting_probability: start point not strictly inside container");
  }
  if (A.empty()) {
    EstimateWithCI est;
    est.mean = 0.0;
    est.std_error = 0.0;
    est.n_samples = n_paths;
    est.method = CiMethod::kWilson;
    est.bias_bound = 0.0;
    return est;
  }
  if (!A.inside(container, d)) {
    throw std::invalid_argument("hitting_probability: target set not contained in container");
  }
  std::vector<std::uint8_t> hit(n_paths), censored(n_paths);
  parallel_for(n_paths, workers, [&](std::size_t i) {
    auto [path, exit] = simulate_until_exit(kernel, y, container, cfg, i);
    hit[i] = path_hits_before_exit(path, exit, A, d) ? 1 : 0;
    censored[i] = exit.exited ? 0 : 1;
  });
  std::uint64_t successes = 0, unexited = 0;
  for (std::size_t i = 0; i < n_paths; ++i) {
    successes += hit[i];
    unexited += censored[i];
  }
  // paths that neither hit nor left by t_max count as misses; disclose them
  const double censor_bias = static_cast<double>(unexited) / static_cast<double>(n_paths);
  return summarize_wilson(successes, n_paths, censor_bias + gauss_grid_bias(cfg));
}

std::vector<double> occupation_time_samples(const JumpKernel& kernel, const Vec& x0,
                                            const RegionUnion& B, const Region& domain,
                                            const SimConfig& cfg, std::uint64_t n_paths,
                                            int workers) {
  const int d = kernel.bounds().d;
  if (!B.inside(domain, d)) {
    throw std::invalid_argument("occupation_time: B not contained in domain");
  }
  std::vector<double> values(n_paths);
  parallel_for(n_paths, workers, [&](std::size_t i) {
    auto [path, exit] = simulate_until_exit(kernel, x0, domain, cfg, i);
    (void)exit;
    values[i] = path_occupation(path, B, d);
  });
  return values;
}

EstimateWithCI occupation_time(const JumpKernel& kernel, const Vec& x0, const RegionUnion& B,
                               const Region& domain, const SimConfig& cfg, std::uint64_t n_paths,
                               int workers) {
  if (n_paths < 2) throw std::invalid_argument("occupation_time: need N >= 2");
  const auto values = occupation_time_samples(kernel, x0, B, domain, cfg, n_paths, workers);
  return summarize_clt(values, gauss_grid_bias(cfg));
}

EstimateWithCI tube_probability(const JumpKernel& kernel, const Polyline& phi, double eps,
                                const SimConfig& cfg, std::uint64_t n_paths, int workers) {
  if (!(eps > 0.0)) throw std::invalid_argument("tube_probability: eps must be > 0");
  const int d = kernel.bounds().d;
  SimConfig run_cfg = cfg;
  run_cfg.t_max = std::min(cfg.t_max, phi.duration());
  std::vector<std::uint8_t> inside(n_paths);
  parallel_for(n_paths, workers, [&](std::size_t i) {
    const PathSkeleton path = simulate_path(kernel, phi.start(), run_cfg, i);
    inside[i] = path_tube_sup(path, phi, d) < eps ? 1 : 0;
  });
  std::uint64_t successes = 0;
  for (auto v : inside) successes += v;
  return summarize_wilson(successes, n_paths, gauss_grid_bias(run_cfg));
}

std::vector<double> resolvent_samples(const JumpKernel& kernel, const Vec& x0,
                                      const ScalarField& f, double lambda, const SimConfig& cfg,
                                      std::uint64_t n_paths, int workers) {
  if (!(lambda > 0.0)) throw std::invalid_argument("resolvent: lambda must be > 0");
  if (!f.f) throw std::invalid_argument("resolvent: missing field");
  const int d = kernel.bounds().d;
  std::vector<double> values(n_paths);
  parallel_for(n_paths, workers, [&](std::size_t i) {
    const PathSkeleton path = simulate_path(kernel, x0, cfg, i);
    values[i] = path_resolvent(path, f, lambda, d);
  });
  return values;
}

EstimateWithCI resolvent(const JumpKernel& kernel, const Vec& x0, const ScalarField& f,
                         double lambda, const SimConfig& cfg, std::uint64_t n_paths, int workers) {
  if (n_paths < 2) throw std::invalid_argument("resolvent: need N >= 2");
  const auto values = resolvent_samples(kernel, x0, f, lambda, cfg, n_paths, workers);
  const double tail = f.sup_abs * std::exp(-lambda * cfg.t_max) / lambda;
  return summarize_clt(values, tail + gauss_grid_bias(cfg));
}

}  // namespace stablelike
