#pragma once

// Discounted occupation measure mu, the polynomial mollifier phi_eps, and the
// mollified kernel
//   n_eps(x,h) = int phi_eps(x-y) n(y,h) mu(dy) / int phi_eps(x-y) mu(dy),
// evaluated as exact sums over the weighted path-atom ensemble representing
// mu, with a tiny base-kernel regularizer keeping the ratio defined where the
// finite ensemble leaves gaps. Every value is a convex combination of base
// kernel values, so the two-sided bounds and h-symmetry are inherited exactly.

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "stablelike/estimators.hpp"
#include "stablelike/geometry.hpp"
#include "stablelike/kernels.hpp"
#include "stablelike/rng.hpp"
#include "stablelike/sampler.hpp"

namespace stablelike {

// phi_eps(x) = eps^{-d} * c_d * (1 - |x/eps|^2)^3 on |x| < eps, 0 outside;
// c_d = Gamma(d/2 + 4) / (6 * pi^{d/2}) makes the integral 1 (d=1: 35/32).
struct Mollifier {
  int d = 1;
  double eps = 0.1;
  double c_d = 35.0 / 32.0;

  double profile(double u2) const {  // u2 = |z|^2 for the unscaled bump
    if (u2 >= 1.0) return 0.0;
    const double s = 1.0 - u2;
    return c_d * s * s * s;
  }

  double operator()(const Vec& z) const {
    const double u2 = norm2(z, d) / (eps * eps);
    return profile(u2) / std::pow(eps, d);
  }
};

double mollifier_normalizing_constant(int d);
Mollifier build_mollifier(int d, double eps);

// Draw z with density proportional to the unscaled bump profile on the unit
// ball (rejection from the uniform ball).
Vec sample_mollifier_offset(const Mollifier& mollifier, RngStream& rng);

struct WeightedAtom {
  Vec y = zero_vec();
  double w = 0.0;  // (exp(-lambda t_i) - exp(-lambda t_{i+1})) / lambda
};

// Ensemble representation of mu(C) = E int_0^inf exp(-lambda t) 1_C(X_t) dt:
// one weighted atom list per simulated path, truncated at t_max.
struct OccupationMeasure {
  int d = 1;
  double lambda = 1.0;
  Vec start = zero_vec();
  double t_max = 0.0;
  std::vector<std::vector<WeightedAtom>> paths;
  // (1/M) * sum over paths of (1 - exp(-lambda * horizon)) / lambda; equal to
  // the atom-weight sum by telescoping, kept in closed form so the horizon
  // tail is the only deviation from 1/lambda.
  double total_mass = 0.0;

  std::size_t path_count() const { return paths.size(); }
  std::size_t atom_count() const;
  double tail_bound() const { return std::exp(-lambda * t_max) / lambda; }

  // mu_hat(C) = (1/M) sum of atom weights with position in C.
  double measure(const RegionUnion& C) const;

  // (#paths with at least one atom in C, #paths); feeds Wilson positivity checks.
  std::pair<std::uint64_t, std::uint64_t> paths_charging(const RegionUnion& C) const;
};

OccupationMeasure estimate_mu(const JumpKernel& kernel, const Vec& x0, double lambda,
                              const SimConfig& cfg, std::uint64_t n_paths, int workers = 1);
using OccupationMeasurePtr = std::shared_ptr<const OccupationMeasure>;

class MollifiedKernel : public JumpKernel {
 public:
  MollifiedKernel(KernelPtr base, OccupationMeasurePtr mu, double mollify_eps);

  const JumpKernel& base() const { return *base_; }
  const OccupationMeasure& mu() const { return *mu_; }
  const Mollifier& mollifier() const { return mollifier_; }
  double regularizer_weight() const { return regularizer_; }

  IntensityDependence dependence() const override { return base_->dependence(); }
  double bounded_intensity(const Vec& x, const Vec& h) const override;
  double mean_bounded_intensity(const Vec& x) const override;

  std::uint64_t evaluation_count() const { return evaluations_.load(); }
  std::uint64_t support_failure_count() const { return support_failures_.load(); }
  double support_failure_fraction() const;

  // Per-path-group values of the mollified bounded intensity at (x, h); the
  // spread across groups gives a standard error for the ensemble ratio.
  std::vector<double> group_values(const Vec& x, const Vec& h, int groups) const;

  // d = 1, state-only bases: an interpolating kernel whose node values are
  // exact mollified evaluations on a grid of spacing eps * spacing_factor.
  // Node values live in [kappa, 1/kappa], so linear interpolation preserves
  // the two-sided bounds; intended for simulation, where per-candidate exact
  // atom sums are unaffordable.
  KernelPtr make_sampling_interpolant(double spacing_factor = 1.0 / 16.0) const;

 private:
  struct Atom {
    double y0;           // sort key: first coordinate
    Vec y;
    double w;
    double state_value;  // bounded intensity of the base at y (state-only bases)
    std::uint32_t path;
  };

  struct RatioSums {
    double weighted_value = 0.0;  // sum of w * phi * bi_base(y, h)
    double weight = 0.0;          // sum of w * phi
  };

  RatioSums window_sums(const Vec& x, const Vec& h, bool state_only) const;

  KernelPtr base_;
  OccupationMeasurePtr mu_;
  Mollifier mollifier_;
  double regularizer_ = 0.0;
  bool state_only_base_ = false;
  std::vector<Atom> atoms_;  // sorted by y0
  mutable std::atomic<std::uint64_t> evaluations_{0};
  mutable std::atomic<std::uint64_t> support_failures_{0};
};

struct ConvergenceRow {
  double eps = 0.0;
  double estimate = 0.0;   // mollified-kernel side
  double reference = 0.0;  // base-kernel resolvent
  double abs_error = 0.0;
  double combined_se = 0.0;  // SE of the paired per-path difference
  double support_failure_fraction = 0.0;
};

// For each eps (decreasing): builds mu from M paths under the base kernel,
// wraps it into a mollified kernel, estimates the mollifier-convolved
// resolvent (start points x0 - eps*z with z drawn from the mollifier) with N
// paths, and differences against the base-kernel resolvent on paired path
// seeds (common random numbers keep the difference tight).
std::vector<ConvergenceRow> resolvent_convergence_check(
    const KernelPtr& base, const Vec& x0, const ScalarField& f, double lambda,
    const std::vector<double>& eps_list, const SimConfig& resolvent_cfg, const SimConfig& mu_cfg,
    std::uint64_t n_paths, std::uint64_t m_paths, int workers = 1);

struct KernelErrorRow {
  double eps = 0.0;
  double sup_error = 0.0;  // sup over the grid of |n_eps - n| * |h|^{d+alpha}
  double se_at_argmax = 0.0;
  double support_failure_fraction = 0.0;
  Vec argmax_x = zero_vec();
};

// Sup-grid distance between the mollified and base bounded intensities per
// eps, sharing one occupation ensemble. Throws SupportCoverageError when more
// than 1% of grid evaluations fall back to the regularizer.
std::vector<KernelErrorRow> kernel_convergence_check(const KernelPtr& base,
                                                     const OccupationMeasurePtr& mu,
                                                     const std::vector<double>& eps_list,
                                                     const std::vector<Vec>& x_grid,
                                                     const std::vector<Vec>& h_grid,
                                                     int se_groups = 20);

// Salt mixed into master seeds so occupation ensembles never share streams
// with estimator paths.
inline constexpr std::uint64_t kMuSeedSalt = 0xA5A5'5A5A'C3C3'3C3Cull;
inline constexpr std::uint64_t kOffsetSeedSalt = 0x0F0F'F0F0'9696'6969ull;

}  // namespace stablelike
