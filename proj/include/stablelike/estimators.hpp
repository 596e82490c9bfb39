#pragma once

// Monte Carlo functionals of the simulated process: exit times, hitting
// probabilities, occupation times, tube probabilities, and resolvents, each
// with a confidence interval and a disclosed bias bound. Per-path values are
// exact functionals of the piecewise-constant skeleton.

#include <cstdint>
#include <functional>
#include <vector>

#include "stablelike/geometry.hpp"
#include "stablelike/kernels.hpp"
#include "stablelike/sampler.hpp"

namespace stablelike {

enum class CiMethod { kClt, kWilson };

struct EstimateWithCI {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  CiMethod method = CiMethod::kClt;
  double bias_bound = 0.0;  // disclosed truncation / horizon / grid bias

  double ci_low() const;
  double ci_high() const;
};

// Wilson 95% score interval for `successes` out of `n`.
std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t n);

// Summarizes per-path values with a CLT interval (sample mean and SE).
EstimateWithCI summarize_clt(const std::vector<double>& values, double bias_bound);
EstimateWithCI summarize_wilson(std::uint64_t successes, std::uint64_t n, double bias_bound);

struct ScalarField {
  std::function<double(const Vec&)> f;
  double sup_abs = 1.0;  // declared bound on |f|
};

// ---- exact per-path functionals on a skeleton ----

// Exit time tau ^ t_max of the skeleton produced by simulate_until_exit.
double path_exit_time(const PathSkeleton& path, const ExitRecord& exit);

// Integral of 1_B(X_s) ds over [0, horizon). Accumulates the time spent
// outside B and returns horizon minus that, so B = (whole domain) telescopes
// bit-exactly to the exit time and nested sets are monotone path-by-path.
double path_occupation(const PathSkeleton& path, const RegionUnion& B, int d);

// sup over s in [0, min(horizon, phi.duration())] of |X_s - phi(s)|,
// computed exactly: the distance from a fixed point to a line segment is
// maximized at a segment endpoint.
double path_tube_sup(const PathSkeleton& path, const Polyline& phi, int d);

// Sum over skeleton pieces of f(x_i) * (exp(-lambda t_i) - exp(-lambda t_{i+1})) / lambda.
double path_resolvent(const PathSkeleton& path, const ScalarField& f, double lambda, int d);

// True if any skeleton position (including the start) lies in A before the
// path leaves `container`; exact for piecewise-constant paths.
bool path_hits_before_exit(const PathSkeleton& path, const ExitRecord& exit,
                           const RegionUnion& A, int d);

// ---- Monte Carlo estimators ----

EstimateWithCI exit_time_mean(const JumpKernel& kernel, const Vec& x0, const Region& domain,
                              const SimConfig& cfg, std::uint64_t n_paths, int workers = 1);

// Per-path exit times (tau ^ t_max), index-ordered; shared by the envelope
// and acceptance suites.
std::vector<double> exit_time_samples(const JumpKernel& kernel, const Vec& x0,
                                      const Region& domain, const SimConfig& cfg,
                                      std::uint64_t n_paths, int workers = 1);

EstimateWithCI hitting_probability(const JumpKernel& kernel, const Vec& y, const RegionUnion& A,
                                   const Region& container, const SimConfig& cfg,
                                   std::uint64_t n_paths, int workers = 1);

EstimateWithCI occupation_time(const JumpKernel& kernel, const Vec& x0, const RegionUnion& B,
                               const Region& domain, const SimConfig& cfg, std::uint64_t n_paths,
                               int workers = 1);

std::vector<double> occupation_time_samples(const JumpKernel& kernel, const Vec& x0,
                                            const RegionUnion& B, const Region& domain,
                                            const SimConfig& cfg, std::uint64_t n_paths,
                                            int workers = 1);

EstimateWithCI tube_probability(const JumpKernel& kernel, const Polyline& phi, double eps,
                                const SimConfig& cfg, std::uint64_t n_paths, int workers = 1);

EstimateWithCI resolvent(const JumpKernel& kernel, const Vec& x0, const ScalarField& f,
                         double lambda, const SimConfig& cfg, std::uint64_t n_paths,
                         int workers = 1);

std::vector<double> resolvent_samples(const JumpKernel& kernel, const Vec& x0,
                                      const ScalarField& f, double lambda, const SimConfig& cfg,
                                      std::uint64_t n_paths, int workers = 1);

}  // namespace stablelike
