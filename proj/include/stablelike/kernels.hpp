#pragma once

// Jump-kernel abstraction: intensities n(x, h) of jumps from x to x + h,
// sandwiched between kappa/|h|^{d+alpha} and (1/kappa)/|h|^{d+alpha}, with
// built-in families and validation helpers.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stablelike/geometry.hpp"

namespace stablelike {

struct KernelBounds {
  int d = 1;             // spatial dimension, 1..3
  double alpha = 1.0;    // stability index, in (0, 2)
  double kappa = 0.5;    // ellipticity constant, in (0, 1]
  std::optional<double> eta;  // continuity exponent, > 0 when present

  void validate() const;
};

enum class KernelFamily {
  kConstantStable,
  kModulated,
  kAnisotropic,
  kMollified,
  kUserDefined,
};

const char* family_name(KernelFamily family);

// How the bound-normalized intensity n(x,h)*|h|^{d+alpha} depends on h.
// The sampler uses this to defer drawing parts of a candidate jump that
// cannot affect acceptance.
enum class IntensityDependence {
  kStateOnly,   // depends on x only (constant and modulated families)
  kDirection,   // depends on x and h/|h| (anisotropic family)
  kFull,        // depends on x and h (user-defined kernels)
};

// Normalization constant c(d, alpha) for which c/|h|^{d+alpha} generates the
// standard isotropic alpha-stable process (Fourier symbol -|xi|^alpha).
// d = 1: alpha * 2^{alpha-1} * Gamma((1+alpha)/2) / (sqrt(pi) * Gamma(1-alpha/2)).
double stable_normalization(int d, double alpha);

// (1 + log+(1/r))^{1+eta}; weights how much x-continuity is demanded of the
// kernel at small jump sizes.
double continuity_weight(double r, double eta);

class JumpKernel {
 public:
  virtual ~JumpKernel() = default;

  const KernelBounds& bounds() const { return bounds_; }
  KernelFamily family() const { return family_; }
  virtual IntensityDependence dependence() const = 0;

  // n(x,h) * |h|^{d+alpha}; lies in [kappa, 1/kappa] for a conforming kernel.
  virtual double bounded_intensity(const Vec& x, const Vec& h) const = 0;

  // Angular average of the bounded intensity at x; drives the isotropic
  // small-jump Gaussian variance in GAUSS mode.
  virtual double mean_bounded_intensity(const Vec& x) const = 0;

  // n(x, h); throws std::domain_error on |h| = 0.
  double evaluate(const Vec& x, const Vec& h) const;

 protected:
  JumpKernel(KernelBounds bounds, KernelFamily family);

  KernelBounds bounds_;
  KernelFamily family_;
};

using KernelPtr = std::shared_ptr<const JumpKernel>;

// n(x,h) = c / |h|^{d+alpha}. The "standard" variant fixes
// c = stable_normalization(d, alpha) so the simulated process matches the
// exact stable samplers and closed forms in the oracles module.
class ConstantStableKernel : public JumpKernel {
 public:
  // kappa defaults to the tightest admissible value min(c, 1/c) (capped at 1).
  ConstantStableKernel(int d, double alpha, double c,
                       std::optional<double> kappa = std::nullopt,
                       std::optional<double> eta = std::nullopt);

  static std::shared_ptr<ConstantStableKernel> standard(
      int d, double alpha, std::optional<double> eta = std::nullopt);

  double c() const { return c_; }

  IntensityDependence dependence() const override { return IntensityDependence::kStateOnly; }
  double bounded_intensity(const Vec&, const Vec&) const override { return c_; }
  double mean_bounded_intensity(const Vec&) const override { return c_; }

 private:
  double c_;
};

// n(x,h) = m(x) / |h|^{d+alpha} with m(x) = 1 + a * sin(omega * x_1).
// The sine modulation attains the full range [1-|a|, 1+|a|] and has
// Lipschitz constant |a| * omega, both used by the validation tests.
class ModulatedKernel : public JumpKernel {
 public:
  ModulatedKernel(int d, double alpha, double a, double omega = 3.0,
                  std::optional<double> kappa = std::nullopt,
                  std::optional<double> eta = std::nullopt);

  double a() const { return a_; }
  double omega() const { return omega_; }
  double modulation(const Vec& x) const { return 1.0 + a_ * std::sin(omega_ * x[0]); }
  double modulation_lipschitz() const { return std::abs(a_) * omega_; }

  IntensityDependence dependence() const override { return IntensityDependence::kStateOnly; }
  double bounded_intensity(const Vec& x, const Vec&) const override { return modulation(x); }
  double mean_bounded_intensity(const Vec& x) const override { return modulation(x); }

 private:
  double a_;
  double omega_;
};

// n(x,h) = g(x, h/|h|) / |h|^{d+alpha}, g symmetric in the direction argument
// and bounded in [kappa, 1/kappa]. Symmetry is probed at construction.
class AnisotropicKernel : public JumpKernel {
 public:
  using DirectionFn = std::function<double(const Vec& x, const Vec& unit_dir)>;

  AnisotropicKernel(int d, double alpha, DirectionFn g, double kappa,
                    std::optional<double> eta = std::nullopt);

  IntensityDependence dependence() const override { return IntensityDependence::kDirection; }
  double bounded_intensity(const Vec& x, const Vec& h) const override;
  double mean_bounded_intensity(const Vec& x) const override;

 private:
  DirectionFn g_;
  std::vector<Vec> quadrature_dirs_;  // fixed direction set for the angular mean
};

// User-supplied n(x, h) with declared bounds. Validation of the declared
// bounds is advisory (validate_bounds), not enforced per evaluation.
// Symmetry in h is probed at construction and asymmetric kernels rejected.
class UserKernel : public JumpKernel {
 public:
  using IntensityFn = std::function<double(const Vec& x, const Vec& h)>;

  UserKernel(KernelBounds bounds, IntensityFn n, std::string label = "user");

  const std::string& label() const { return label_; }

  IntensityDependence dependence() const override { return IntensityDependence::kFull; }
  double bounded_intensity(const Vec& x, const Vec& h) const override;
  double mean_bounded_intensity(const Vec& x) const override;

 private:
  IntensityFn n_;
  std::string label_;
};

struct ValidationReport {
  double min_ratio = 0.0;       // min over the grid of n(x,h)*|h|^{d+alpha}
  double max_ratio = 0.0;       // max over the grid
  double max_symmetry_error = 0.0;  // worst relative |n(x,h)-n(x,-h)| / n(x,h)
  bool bounds_pass = false;
  bool symmetry_pass = false;
  bool pass = false;
};

// Samples the two-sided bound and h-symmetry over the given grids.
// Symmetry tolerance is 1e-12 relative.
ValidationReport validate_bounds(const JumpKernel& kernel,
                                 const std::vector<Vec>& x_grid,
                                 const std::vector<Vec>& h_grid);

// sup over the grid (restricted to 0 < |h| <= b) of
// |nbar(x,h) - nbar(y,h)| with nbar = n(x,h) * |h|^{d+alpha} * psi_eta(|h|),
// i.e. the continuity modulus in bound-normalized form.
// Throws ConfigError when the kernel declares no eta.
double continuity_modulus(const JumpKernel& kernel, const Vec& x, const Vec& y,
                          double b, const std::vector<Vec>& h_grid);

// Total envelope jump rate for jumps of size >= eps_cut:
// Lambda = kappa^{-1} * s_d * eps_cut^{-alpha} / alpha.
double envelope_intensity(const KernelBounds& bounds, double eps_cut);

// Default displacement grid: 64 log-spaced radii over [1e-4, 1e2] times a
// direction set closed under negation (2 / 16 / 32 directions for d = 1/2/3).
std::vector<Vec> default_h_grid(int d);
std::vector<Vec> direction_set(int d, int count);

}  // namespace stablelike
