#pragma once

// Path simulation by exact Poisson thinning against the constant stable
// envelope kappa^{-1} |h|^{-d-alpha} restricted to |h| >= eps_cut. Candidate
// jumps arrive at the envelope rate and are accepted with probability
// kappa * n(x,h) * |h|^{d+alpha}, so the accepted jumps have exactly the
// truncated-kernel law, with no time-discretization bias in DROP mode.
// GAUSS mode additionally substitutes the dropped sub-cutoff jumps by
// grid-stepped Gaussian increments with matched covariance.

#include <cstdint>
#include <utility>
#include <vector>

#include "stablelike/geometry.hpp"
#include "stablelike/kernels.hpp"
#include "stablelike/rng.hpp"

namespace stablelike {

enum class SmallJumpMode { kDrop, kGauss };

struct SimConfig {
  double eps_cut = 1e-3;   // truncation radius for the jump split, in (0, 1)
  double t_max = 20.0;     // simulation horizon
  SmallJumpMode small_jump_mode = SmallJumpMode::kDrop;
  double gauss_dt = 0.01;  // time step for GAUSS mode
  std::uint64_t master_seed = 0;

  void validate() const;
};

struct PathEvent {
  double t = 0.0;
  Vec x = zero_vec();
};

// Piecewise-constant sample path: X_t = start on [0, t_1), and X_t = x_i on
// [t_i, t_{i+1}). In GAUSS mode the grid-step Gaussian updates appear as
// events too, so functionals evaluate on the gauss_dt grid.
struct PathSkeleton {
  Vec start = zero_vec();
  std::vector<PathEvent> events;  // strictly increasing times in (0, horizon]
  double horizon = 0.0;
  double truncated_mass_bound = 0.0;  // per-axis dropped-jump variance bound * t_max
  std::uint64_t candidate_count = 0;  // envelope candidates proposed (diagnostic)

  const Vec& position_before(std::size_t event_index) const {
    return event_index == 0 ? start : events[event_index - 1].x;
  }
  const Vec& final_position() const { return events.empty() ? start : events.back().x; }
};

struct ExitRecord {
  double exit_time = 0.0;
  Vec exit_position = zero_vec();
  Vec pre_exit_position = zero_vec();
  bool exited = false;
};

// One envelope candidate displacement: radius Pareto(alpha) with scale
// eps_cut, direction uniform on the sphere. Joint density
// kappa^{-1} |h|^{-d-alpha} / Lambda on |h| >= eps_cut.
Vec sample_candidate(const KernelBounds& bounds, double eps_cut, RngStream& rng);

// Simulates on [0, cfg.t_max]. Output is a pure function of
// (cfg.master_seed, path_index).
PathSkeleton simulate_path(const JumpKernel& kernel, const Vec& x0, const SimConfig& cfg,
                           std::uint64_t path_index);

// Stops at the first event strictly outside `domain` or at t_max, whichever
// comes first. In DROP mode exit detection is exact (the path only moves at
// jumps); overshoot is kept as-is.
std::pair<PathSkeleton, ExitRecord> simulate_until_exit(const JumpKernel& kernel, const Vec& x0,
                                                        const Region& domain, const SimConfig& cfg,
                                                        std::uint64_t path_index);

// Same draws and law as simulate_path / simulate_until_exit, but without
// recording the event list; for estimators that consume only the terminal
// state, where the skeleton storage dominates the runtime.
Vec simulate_endpoint(const JumpKernel& kernel, const Vec& x0, const SimConfig& cfg,
                      std::uint64_t path_index);
ExitRecord simulate_exit_only(const JumpKernel& kernel, const Vec& x0, const Region& domain,
                              const SimConfig& cfg, std::uint64_t path_index);

// Per-axis variance of the dropped sub-cutoff jumps at state x:
// mean_bounded_intensity(x) * s_d * eps_cut^{2-alpha} / (d * (2-alpha)).
double small_jump_variance_per_axis(const JumpKernel& kernel, const Vec& x, double eps_cut);

}  // namespace stablelike
