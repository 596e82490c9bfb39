#include "stablelike/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stablelike/errors.hpp"
#include "stablelike/rng.hpp"

namespace stablelike {

void KernelBounds::validate() const {
  if (d < 1 || d > kMaxDim) throw ConfigError("KernelBounds: d must be in [1,3]");
  if (!(alpha > 0.0 && alpha < 2.0)) throw ConfigError("KernelBounds: alpha must be in (0,2)");
  if (!(kappa > 0.0 && kappa <= 1.0)) throw ConfigError("KernelBounds: kappa must be in (0,1]");
  if (eta && !(*eta > 0.0)) throw ConfigError("KernelBounds: eta must be > 0 when present");
}

const char* family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::kConstantStable: return "constant_stable";
    case KernelFamily::kModulated: return "modulated";
    case KernelFamily::kAnisotropic: return "anisotropic";
    case KernelFamily::kMollified: return "mollified";
    case KernelFamily::kUserDefined: return "user";
  }
  return "?";
}

double stable_normalization(int d, double alpha) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("stable_normalization: d must be in [1,3]");
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::invalid_argument("stable_normalization: alpha must be in (0,2)");
  }
  return alpha * std::pow(2.0, alpha - 1.0) * std::tgamma(0.5 * (d + alpha)) /
         (std::pow(M_PI, 0.5 * d) * std::tgamma(1.0 - 0.5 * alpha));
}

double continuity_weight(double r, double eta) {
  if (!(r > 0.0)) throw std::domain_error("continuity_weight: r must be > 0");
  const double logplus = std::max(0.0, std::log(1.0 / r));
  return std::pow(1.0 + logplus, 1.0 + eta);
}

JumpKernel::JumpKernel(KernelBounds bounds, KernelFamily family)
    : bounds_(bounds), family_(family) {
  bounds_.validate();
}

double JumpKernel::evaluate(const Vec& x, const Vec& h) const {
  const double r = norm(h, bounds_.d);
  if (!(r > 0.0)) throw std::domain_error("evaluate: zero displacement");
  return bounded_intensity(x, h) / std::pow(r, bounds_.d + bounds_.alpha);
}

namespace {

double default_kappa_for_constant(double c) {
  const double k = std::min(c, 1.0 / c);
  return std::min(k, 1.0);
}

}  // namespace

ConstantStableKernel::ConstantStableKernel(int d, double alpha, double c,
                                           std::optional<double> kappa,
                                           std::optional<double> eta)
    : JumpKernel(KernelBounds{d, alpha, kappa.value_or(default_kappa_for_constant(c)), eta},
                 KernelFamily::kConstantStable),
      c_(c) {
  if (!(c_ > 0.0)) throw ConfigError("ConstantStableKernel: c must be > 0");
  if (bounds_.kappa > c_ + 1e-15 || c_ > 1.0 / bounds_.kappa + 1e-15) {
    throw ConfigError("ConstantStableKernel: c outside [kappa, 1/kappa]");
  }
}

std::shared_ptr<ConstantStableKernel> ConstantStableKernel::standard(
    int d, double alpha, std::optional<double> eta) {
  const double c = stable_normalization(d, alpha);
  return std::make_shared<ConstantStableKernel>(d, alpha, c, std::nullopt, eta);
}

ModulatedKernel::ModulatedKernel(int d, double alpha, double a, double omega,
                                 std::optional<double> kappa, std::optional<double> eta)
    : JumpKernel(KernelBounds{d, alpha, kappa.value_or(1.0 - std::abs(a)), eta},
                 KernelFamily::kModulated),
      a_(a),
      omega_(omega) {
  if (!(std::abs(a_) < 1.0)) throw ConfigError("ModulatedKernel: need |a| < 1");
  if (!(omega_ > 0.0)) throw ConfigError("ModulatedKernel: need omega > 0");
}

AnisotropicKernel::AnisotropicKernel(int d, double alpha, DirectionFn g, double kappa,
                                     std::optional<double> eta)
    : JumpKernel(KernelBounds{d, alpha, kappa, eta}, KernelFamily::kAnisotropic),
      g_(std::move(g)) {
  if (!g_) throw ConfigError("AnisotropicKernel: missing direction function");
  quadrature_dirs_ = direction_set(d, d == 1 ? 2 : (d == 2 ? 64 : 128));
  // symmetry probe: g(x, u) must equal g(x, -u)
  const Vec probes[3] = {zero_vec(), make_vec(0.7, -0.3, 0.1), make_vec(-1.9, 2.2, 0.4)};
  for (const Vec& x : probes) {
    for (const Vec& u : quadrature_dirs_) {
      const double fwd = g_(x, u);
      const double bwd = g_(x, negate(u));
      if (std::abs(fwd - bwd) > 1e-9 * std::max(1.0, std::abs(fwd))) {
        throw ConfigError("AnisotropicKernel: direction function is not symmetric");
      }
    }
  }
}

double AnisotropicKernel::bounded_intensity(const Vec& x, const Vec& h) const {
  const double r = norm(h, bounds_.d);
  return g_(x, scale(h, 1.0 / r));
}

double AnisotropicKernel::mean_bounded_intensity(const Vec& x) const {
  double s = 0.0;
  for (const Vec& u : quadrature_dirs_) s += g_(x, u);
  return s / static_cast<double>(quadrature_dirs_.size());
}

UserKernel::UserKernel(KernelBounds bounds, IntensityFn n, std::string label)
    : JumpKernel(bounds, KernelFamily::kUserDefined), n_(std::move(n)), label_(std::move(label)) {
  if (!n_) throw ConfigError("UserKernel: missing intensity function");
  // Symmetric kernels only: symmetry makes the generator's small-jump
  // compensator vanish, so the sampler applies no drift. Probe and reject
  // anything else.
  RngStream rng(0x5EEDull, 0, kPurposeGeneric);
  for (int i = 0; i < 32; ++i) {
    Vec x = zero_vec(), h = zero_vec();
    for (int k = 0; k < bounds_.d; ++k) {
      x[k] = 4.0 * (rng.uniform() - 0.5);
      h[k] = 3.0 * (rng.uniform() - 0.5);
    }
    if (norm(h, bounds_.d) < 1e-3) h[0] += 0.5;
    const double fwd = n_(x, h);
    const double bwd = n_(x, negate(h));
    if (std::abs(fwd - bwd) > 1e-9 * std::max(std::abs(fwd), 1e-300)) {
      throw ConfigError("UserKernel: intensity is not symmetric in h");
    }
  }
}

double UserKernel::bounded_intensity(const Vec& x, const Vec& h) const {
  const double r = norm(h, bounds_.d);
  return n_(x, h) * std::pow(r, bounds_.d + bounds_.alpha);
}

double UserKernel::mean_bounded_intensity(const Vec& x) const {
  // angular mean at a reference radius; user kernels may vary in |h|, in
  // which case this is only the GAUSS-mode variance proxy at that radius
  const auto dirs = direction_set(bounds_.d, bounds_.d == 1 ? 2 : 32);
  const double r_ref = 0.5;
  double s = 0.0;
  for (const Vec& u : dirs) s += bounded_intensity(x, scale(u, r_ref));
  return s / static_cast<double>(dirs.size());
}

ValidationReport validate_bounds(const JumpKernel& kernel, const std::vector<Vec>& x_grid,
                                 const std::vector<Vec>& h_grid) {
  if (x_grid.empty() || h_grid.empty()) {
    throw std::invalid_argument("validate_bounds: grids must be nonempty");
  }
  const KernelBounds& b = kernel.bounds();
  ValidationReport report;
  report.min_ratio = std::numeric_limits<double>::infinity();
  report.max_ratio = -std::numeric_limits<double>::infinity();
  report.max_symmetry_error = 0.0;
  for (const Vec& x : x_grid) {
    for (const Vec& h : h_grid) {
      if (!(norm(h, b.d) > 0.0)) throw std::domain_error("validate_bounds: zero displacement in grid");
      const double ratio = kernel.bounded_intensity(x, h);
      report.min_ratio = std::min(report.min_ratio, ratio);
      report.max_ratio = std::max(report.max_ratio, ratio);
      const double mirrored = kernel.bounded_intensity(x, negate(h));
      const double rel = std::abs(ratio - mirrored) / std::max(std::abs(ratio), 1e-300);
      report.max_symmetry_error = std::max(report.max_symmetry_error, rel);
    }
  }
  report.bounds_pass = report.min_ratio >= b.kappa - 1e-12 &&
                       report.max_ratio <= 1.0 / b.kappa + 1e-12;
  report.symmetry_pass = report.max_symmetry_error <= 1e-12;
  report.pass = report.bounds_pass && report.symmetry_pass;
  return report;
}

double continuity_modulus(const JumpKernel& kernel, const Vec& x, const Vec& y, double b,
                          const std::vector<Vec>& h_grid) {
  const KernelBounds& kb = kernel.bounds();
  if (!kb.eta) throw ConfigError("continuity_modulus: kernel declares no eta");
  if (!(b > 0.0)) throw std::invalid_argument("continuity_modulus: b must be > 0");
  double sup = 0.0;
  bool any = false;
  for (const Vec& h : h_grid) {
    const double r = norm(h, kb.d);
    if (!(r > 0.0)) throw std::domain_error("continuity_modulus: zero displacement in grid");
    if (r > b) continue;
    any = true;
    const double w = continuity_weight(r, *kb.eta);
    const double diff = std::abs(kernel.bounded_intensity(x, h) - kernel.bounded_intensity(y, h)) * w;
    sup = std::max(sup, diff);
  }
  if (!any) throw std::invalid_argument("continuity_modulus: no grid point with |h| <= b");
  return sup;
}

double envelope_intensity(const KernelBounds& bounds, double eps_cut) {
  bounds.validate();
  if (!(eps_cut > 0.0)) throw std::domain_error("envelope_intensity: eps_cut must be > 0");
  return (1.0 / bounds.kappa) * sphere_surface_area(bounds.d) *
         std::pow(eps_cut, -bounds.alpha) / bounds.alpha;
}

std::vector<Vec> direction_set(int d, int count) {
  std::vector<Vec> dirs;
  if (d == 1) {
    dirs.push_back(make_vec(1.0));
    dirs.push_back(make_vec(-1.0));
    return dirs;
  }
  if (d == 2) {
    if (count % 2 != 0) ++count;  // keep the set closed under negation
    dirs.reserve(count);
    for (int k = 0; k < count; ++k) {
      const double theta = 2.0 * M_PI * k / count;
      dirs.push_back(make_vec(std::cos(theta), std::sin(theta)));
    }
    return dirs;
  }
  // d == 3: Fibonacci sphere points plus their antipodes
  const int half = std::max(1, count / 2);
  dirs.reserve(2 * half);
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < half; ++k) {
    const double z = 1.0 - (k + 0.5) / half;  // upper hemisphere, z in (0, 1)
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double theta = golden * k;
    const Vec u = make_vec(rho * std::cos(theta), rho * std::sin(theta), z);
    dirs.push_back(u);
    dirs.push_back(negate(u));
  }
  return dirs;
}

std::vector<Vec> default_h_grid(int d) {
  const int n_radii = 64;
  const double r_lo = 1e-4, r_hi = 1e2;
  const auto dirs = direction_set(d, 16);
  std::vector<Vec> grid;
  grid.reserve(n_radii * dirs.size());
  for (int i = 0; i < n_radii; ++i) {
    const double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (n_radii - 1));
    for (const Vec& u : dirs) grid.push_back(scale(u, r));
  }
  return grid;
}

}  // namespace stablelike
