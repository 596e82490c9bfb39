#include "stablelike/sampler.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "stablelike/errors.hpp"

namespace stablelike {

void SimConfig::validate() const {
  if (!(eps_cut > 0.0)) throw ConfigError("SimConfig: eps_cut must be > 0");
  if (!(eps_cut < 1.0)) throw ConfigError("SimConfig: eps_cut must be < 1");
  if (!(t_max > 0.0)) throw ConfigError("SimConfig: t_max must be > 0");
  if (small_jump_mode == SmallJumpMode::kGauss && !(gauss_dt > 0.0)) {
    throw ConfigError("SimConfig: gauss_dt must be > 0 in GAUSS mode");
  }
}

double small_jump_variance_per_axis(const JumpKernel& kernel, const Vec& x, double eps_cut) {
  const KernelBounds& b = kernel.bounds();
  return kernel.mean_bounded_intensity(x) * sphere_surface_area(b.d) *
         std::pow(eps_cut, 2.0 - b.alpha) / (b.d * (2.0 - b.alpha));
}

namespace {

void draw_direction(int d, RngStream& rng, Vec& u) {
  if (d == 1) {
    u[0] = rng.uniform() < 0.5 ? 1.0 : -1.0;
    return;
  }
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (int i = 0; i < d; ++i) {
      u[i] = rng.normal();
      n2 += u[i] * u[i];
    }
  } while (n2 == 0.0);
  const double inv = 1.0 / std::sqrt(n2);
  for (int i = 0; i < d; ++i) u[i] *= inv;
}

double draw_radius(double eps_cut, double alpha, RngStream& rng) {
  // P(R > r) = (eps_cut / r)^alpha on [eps_cut, inf)
  return eps_cut * std::pow(rng.uniform(), -1.0 / alpha);
}

void check_acceptance(double p) {
  if (!(p >= -1e-9 && p <= 1.0 + 1e-9)) {
    throw KernelBoundViolation(
        "simulate_path: acceptance probability outside [0,1]; declared kappa does not bound "
        "this kernel");
  }
}

// Poisson(mu) by Knuth's product method, chunked so exp(-chunk) stays normal.
std::uint64_t poisson_count(double mu, RngStream& rng) {
  std::uint64_t count = 0;
  while (mu > 0.0) {
    const double chunk = std::min(mu, 500.0);
    mu -= chunk;
    const double limit = std::exp(-chunk);
    double prod = rng.uniform();
    while (prod > limit) {
      ++count;
      prod *= rng.uniform();
    }
  }
  return count;
}

// Core thinning loop shared by simulate_path and simulate_until_exit. The
// acceptance test only consumes the parts of a candidate it depends on
// (nothing for state-only kernels, the direction for anisotropic ones); the
// remaining coordinates are exchangeable with the acceptance draw, so the
// accepted-jump law is unchanged while rejected candidates stay cheap.
std::pair<PathSkeleton, ExitRecord> run_thinning(const JumpKernel& kernel, const Vec& x0,
                                                 const SimConfig& cfg, std::uint64_t path_index,
                                                 const Region* stop_domain,
                                                 bool record_events = true) {
  cfg.validate();
  const KernelBounds& bounds = kernel.bounds();
  const int d = bounds.d;
  if (!all_finite(x0, d)) throw std::invalid_argument("simulate_path: non-finite start");
  if (stop_domain != nullptr && !strictly_inside(*stop_domain, x0, d)) {
    throw std::invalid_argument("simulate_until_exit: start point not strictly inside the domain");
  }

  const double envelope_rate = envelope_intensity(bounds, cfg.eps_cut);
  const double kappa = bounds.kappa;
  const bool gauss = cfg.small_jump_mode == SmallJumpMode::kGauss;
  const IntensityDependence dep = kernel.dependence();

  RngStream jump_rng(cfg.master_seed, path_index, kPurposeJumps);
  RngStream gauss_rng(cfg.master_seed, path_index, kPurposeGauss);

  PathSkeleton path;
  path.start = x0;
  path.horizon = cfg.t_max;
  path.truncated_mass_bound = (1.0 / kappa) * sphere_surface_area(d) *
                              std::pow(cfg.eps_cut, 2.0 - bounds.alpha) /
                              (d * (2.0 - bounds.alpha)) * cfg.t_max;

  ExitRecord exit;
  exit.exited = false;

  Vec x = x0;
  double t = 0.0;
  // acceptance probability is constant between accepted jumps for
  // state-only kernels; cache it per state
  double state_accept = 0.0;
  if (dep == IntensityDependence::kStateOnly) {
    state_accept = kappa * kernel.bounded_intensity(x, x /*unused*/);
    check_acceptance(state_accept);
  }

  std::uint64_t grid_step = 1;
  double next_grid = gauss ? cfg.gauss_dt : std::numeric_limits<double>::infinity();

  auto settle_event = [&](double at, const Vec& prev) -> bool {
    if (record_events) path.events.push_back({at, x});
    if (stop_domain != nullptr && !contains(*stop_domain, x, d)) {
      exit.exited = true;
      exit.exit_time = at;
      exit.exit_position = x;
      exit.pre_exit_position = prev;
      path.horizon = at;
      return true;
    }
    if (dep == IntensityDependence::kStateOnly) {
      state_accept = kappa * kernel.bounded_intensity(x, x);
      check_acceptance(state_accept);
    }
    return false;
  };

  auto gauss_step = [&]() -> bool {  // advance to next_grid; true when the path stops
    const double sigma = std::sqrt(
        std::max(0.0, small_jump_variance_per_axis(kernel, x, cfg.eps_cut) * cfg.gauss_dt));
    const Vec prev = x;
    for (int i = 0; i < d; ++i) x[i] += sigma * gauss_rng.normal();
    t = next_grid;
    ++grid_step;
    next_grid = grid_step * cfg.gauss_dt;
    return settle_event(t, prev);
  };

  if (dep == IntensityDependence::kStateOnly) {
    // Between accepted jumps the state, and so the acceptance probability p,
    // is frozen. The stretch to the next accepted jump then has a closed
    // form: the accepted gap is Exp(rate * p), and the rejected-candidate
    // count on an interval of length w, given no acceptance there, is
    // Poisson(rate * (1-p) * w). Sampling those directly is law-identical to
    // candidate-by-candidate thinning, including the candidate counts.
    while (true) {
      const double p = std::min(state_accept, 1.0);
      const double accepted_gap =
          p > 0.0 ? jump_rng.exponential() / (envelope_rate * p)
                  : std::numeric_limits<double>::infinity();
      const double reject_rate = envelope_rate * std::max(0.0, 1.0 - p);
      if (gauss && t + accepted_gap >= next_grid) {
        if (next_grid > cfg.t_max) {
          path.candidate_count += poisson_count(reject_rate * (cfg.t_max - t), jump_rng);
          t = cfg.t_max;
          break;
        }
        path.candidate_count += poisson_count(reject_rate * (next_grid - t), jump_rng);
        if (gauss_step()) break;
        continue;
      }
      if (t + accepted_gap > cfg.t_max) {
        path.candidate_count += poisson_count(reject_rate * (cfg.t_max - t), jump_rng);
        t = cfg.t_max;
        break;
      }
      t += accepted_gap;
      path.candidate_count += poisson_count(reject_rate * accepted_gap, jump_rng) + 1;
      Vec h = zero_vec();
      const double r = draw_radius(cfg.eps_cut, bounds.alpha, jump_rng);
      draw_direction(d, jump_rng, h);
      const Vec prev = x;
      for (int i = 0; i < d; ++i) x[i] += h[i] * r;
      if (settle_event(t, prev)) break;
    }
  } else {
    double next_candidate = jump_rng.exponential() / envelope_rate;
    while (true) {
      if (gauss && next_grid <= next_candidate) {
        if (next_grid > cfg.t_max) break;
        if (gauss_step()) break;
        continue;
      }
      if (next_candidate > cfg.t_max) break;
      t = next_candidate;
      next_candidate = t + jump_rng.exponential() / envelope_rate;
      ++path.candidate_count;

      bool accepted = false;
      Vec h = zero_vec();
      if (dep == IntensityDependence::kDirection) {
        draw_direction(d, jump_rng, h);
        const double p = kappa * kernel.bounded_intensity(x, h);
        check_acceptance(p);
        if (jump_rng.uniform() < p) {
          const double r = draw_radius(cfg.eps_cut, bounds.alpha, jump_rng);
          for (int i = 0; i < d; ++i) h[i] *= r;
          accepted = true;
        }
      } else {
        const double r = draw_radius(cfg.eps_cut, bounds.alpha, jump_rng);
        draw_direction(d, jump_rng, h);
        for (int i = 0; i < d; ++i) h[i] *= r;
        const double p = kappa * kernel.bounded_intensity(x, h);
        check_acceptance(p);
        accepted = jump_rng.uniform() < p;
      }
      if (!accepted) continue;
      const Vec prev = x;
      x = add(x, h);
      if (settle_event(t, prev)) break;
    }
  }

  if (!exit.exited) {
    exit.exit_time = cfg.t_max;
    exit.exit_position = x;
    exit.pre_exit_position = x;
  }
  return {std::move(path), exit};
}

}  // namespace

Vec sample_candidate(const KernelBounds& bounds, double eps_cut, RngStream& rng) {
  bounds.validate();
  if (!(eps_cut > 0.0)) throw std::domain_error("sample_candidate: eps_cut must be > 0");
  Vec h = zero_vec();
  const double r = draw_radius(eps_cut, bounds.alpha, rng);
  draw_direction(bounds.d, rng, h);
  for (int i = 0; i < bounds.d; ++i) h[i] *= r;
  return h;
}

PathSkeleton simulate_path(const JumpKernel& kernel, const Vec& x0, const SimConfig& cfg,
                           std::uint64_t path_index) {
  return run_thinning(kernel, x0, cfg, path_index, nullptr).first;
}

std::pair<PathSkeleton, ExitRecord> simulate_until_exit(const JumpKernel& kernel, const Vec& x0,
                                                        const Region& domain, const SimConfig& cfg,
                                                        std::uint64_t path_index) {
  return run_thinning(kernel, x0, cfg, path_index, &domain);
}

Vec simulate_endpoint(const JumpKernel& kernel, const Vec& x0, const SimConfig& cfg,
                      std::uint64_t path_index) {
  return run_thinning(kernel, x0, cfg, path_index, nullptr, false).second.exit_position;
}

ExitRecord simulate_exit_only(const JumpKernel& kernel, const Vec& x0, const Region& domain,
                              const SimConfig& cfg, std::uint64_t path_index) {
  return run_thinning(kernel, x0, cfg, path_index, &domain, false).second;
}

}  // namespace stablelike
