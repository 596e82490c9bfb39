#include "stablelike/mollify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stablelike/errors.hpp"
#include "stablelike/parallel.hpp"

namespace stablelike {

double mollifier_normalizing_constant(int d) {
  if (d < 1 || d > kMaxDim) {
    throw std::invalid_argument("mollifier_normalizing_constant: d must be in [1,3]");
  }
  return std::tgamma(0.5 * d + 4.0) / (6.0 * std::pow(M_PI, 0.5 * d));
}

Mollifier build_mollifier(int d, double eps) {
  if (!(eps > 0.0)) throw std::domain_error("build_mollifier: eps must be > 0");
  Mollifier m;
  m.d = d;
  m.eps = eps;
  m.c_d = mollifier_normalizing_constant(d);
  return m;
}

Vec sample_mollifier_offset(const Mollifier& mollifier, RngStream& rng) {
  const int d = mollifier.d;
  while (true) {
    Vec z = zero_vec();
    if (d == 1) {
      z[0] = 2.0 * rng.uniform() - 1.0;
    } else {
      double n2 = 0.0;
      do {
        n2 = 0.0;
        for (int i = 0; i < d; ++i) {
          z[i] = rng.normal();
          n2 += z[i] * z[i];
        }
      } while (n2 == 0.0);
      const double r = std::pow(rng.uniform(), 1.0 / d) / std::sqrt(n2);
      for (int i = 0; i < d; ++i) z[i] *= r;
    }
    const double u2 = norm2(z, d);
    const double s = 1.0 - u2;
    if (rng.uniform() < s * s * s) return z;
  }
}

std::size_t OccupationMeasure::atom_count() const {
  std::size_t n = 0;
  for (const auto& p : paths) n += p.size();
  return n;
}

double OccupationMeasure::measure(const RegionUnion& C) const {
  if (paths.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : paths) {
    for (const auto& a : p) {
      if (C.contains(a.y, d)) sum += a.w;
    }
  }
  return sum / static_cast<double>(paths.size());
}

std::pair<std::uint64_t, std::uint64_t> OccupationMeasure::paths_charging(
    const RegionUnion& C) const {
  std::uint64_t hit = 0;
  for (const auto& p : paths) {
    for (const auto& a : p) {
      if (C.contains(a.y, d)) {
        ++hit;
        break;
      }
    }
  }
  return {hit, paths.size()};
}

OccupationMeasure estimate_mu(const JumpKernel& kernel, const Vec& x0, double lambda,
                              const SimConfig& cfg, std::uint64_t n_paths, int workers) {
  if (!(lambda > 0.0)) throw std::invalid_argument("estimate_mu: lambda must be > 0");
  if (n_paths < 1) throw std::invalid_argument("estimate_mu: need M >= 1");
  const int d = kernel.bounds().d;

  OccupationMeasure mu;
  mu.d = d;
  mu.lambda = lambda;
  mu.start = x0;
  mu.t_max = cfg.t_max;
  mu.paths.resize(n_paths);

  std::vector<double> masses(n_paths);
  parallel_for(n_paths, workers, [&](std::size_t i) {
    const PathSkeleton path = simulate_path(kernel, x0, cfg, i);
    auto& atoms = mu.paths[i];
    atoms.reserve(path.events.size() + 1);
    double discount_prev = 1.0;
    const Vec* pos = &path.start;
    for (const auto& ev : path.events) {
      const double discount = std::exp(-lambda * ev.t);
      const double w = (discount_prev - discount) / lambda;
      if (w > 0.0) atoms.push_back({*pos, w});
      discount_prev = discount;
      pos = &ev.x;
    }
    const double discount_end = std::exp(-lambda * path.horizon);
    const double w_last = (discount_prev - discount_end) / lambda;
    if (w_last > 0.0) atoms.push_back({*pos, w_last});
    // telescoped atom-weight sum, exact per path
    masses[i] = (1.0 - discount_end) / lambda;
  });

  // compensated sum: the mass identity |total - 1/lambda| <= tail must hold
  // to round-off, not to O(M) accumulation error
  double mass = 0.0, carry = 0.0;
  for (double m : masses) {
    const double t = mass + m;
    carry += std::abs(mass) >= std::abs(m) ? (mass - t) + m : (m - t) + mass;
    mass = t;
  }
  mu.total_mass = (mass + carry) / static_cast<double>(n_paths);
  return mu;
}

MollifiedKernel::MollifiedKernel(KernelPtr base, OccupationMeasurePtr mu, double mollify_eps)
    : JumpKernel(base->bounds(), KernelFamily::kMollified),
      base_(std::move(base)),
      mu_(std::move(mu)) {
  if (!(mollify_eps > 0.0)) throw std::domain_error("MollifiedKernel: eps must be > 0");
  if (mu_->d != bounds_.d) throw ConfigError("MollifiedKernel: measure dimension mismatch");
  mollifier_ = build_mollifier(bounds_.d, mollify_eps);
  state_only_base_ = base_->dependence() == IntensityDependence::kStateOnly;

  atoms_.reserve(mu_->atom_count());
  double weight_total = 0.0;
  for (std::size_t p = 0; p < mu_->paths.size(); ++p) {
    for (const auto& a : mu_->paths[p]) {
      Atom atom;
      atom.y0 = a.y[0];
      atom.y = a.y;
      atom.w = a.w;
      atom.state_value = state_only_base_ ? base_->bounded_intensity(a.y, a.y) : 0.0;
      atom.path = static_cast<std::uint32_t>(p);
      atoms_.push_back(atom);
      weight_total += a.w;
    }
  }
  std::sort(atoms_.begin(), atoms_.end(),
            [](const Atom& a, const Atom& b) { return a.y0 < b.y0; });
  regularizer_ = 1e-12 * weight_total;
  if (regularizer_ <= 0.0) regularizer_ = 1e-300;  // empty ensemble: pure base fallback
}

MollifiedKernel::RatioSums MollifiedKernel::window_sums(const Vec& x, const Vec& h,
                                                        bool state_only) const {
  RatioSums sums;
  const double eps = mollifier_.eps;
  const auto lo = std::lower_bound(atoms_.begin(), atoms_.end(), x[0] - eps,
                                   [](const Atom& a, double v) { return a.y0 < v; });
  const auto hi = std::upper_bound(lo, atoms_.end(), x[0] + eps,
                                   [](double v, const Atom& a) { return v < a.y0; });
  const double inv_eps2 = 1.0 / (eps * eps);
  for (auto it = lo; it != hi; ++it) {
    const double u2 = norm2(sub(x, it->y), bounds_.d) * inv_eps2;
    if (u2 >= 1.0) continue;
    const double phi = mollifier_.profile(u2);  // eps^{-d} factor cancels in the ratio
    const double wphi = it->w * phi;
    sums.weight += wphi;
    sums.weighted_value += wphi * (state_only ? it->state_value : base_->bounded_intensity(it->y, h));
  }
  return sums;
}

double MollifiedKernel::bounded_intensity(const Vec& x, const Vec& h) const {
  evaluations_.fetch_add(1, std::memory_order_relaxed);
  const RatioSums sums = window_sums(x, h, state_only_base_);
  if (sums.weight < regularizer_) support_failures_.fetch_add(1, std::memory_order_relaxed);
  const double base_value = base_->bounded_intensity(x, h);
  return (sums.weighted_value + regularizer_ * base_value) / (sums.weight + regularizer_);
}

double MollifiedKernel::mean_bounded_intensity(const Vec& x) const {
  if (state_only_base_) return bounded_intensity(x, x);
  // mollify the base's angular mean with the same weights
  RatioSums sums;
  const double eps = mollifier_.eps;
  const auto lo = std::lower_bound(atoms_.begin(), atoms_.end(), x[0] - eps,
                                   [](const Atom& a, double v) { return a.y0 < v; });
  const auto hi = std::upper_bound(lo, atoms_.end(), x[0] + eps,
                                   [](double v, const Atom& a) { return v < a.y0; });
  for (auto it = lo; it != hi; ++it) {
    const double u2 = norm2(sub(x, it->y), bounds_.d) / (eps * eps);
    if (u2 >= 1.0) continue;
    const double wphi = it->w * mollifier_.profile(u2);
    sums.weight += wphi;
    sums.weighted_value += wphi * base_->mean_bounded_intensity(it->y);
  }
  return (sums.weighted_value + regularizer_ * base_->mean_bounded_intensity(x)) /
         (sums.weight + regularizer_);
}

double MollifiedKernel::support_failure_fraction() const {
  const std::uint64_t evals = evaluations_.load();
  return evals == 0 ? 0.0 : static_cast<double>(support_failures_.load()) / evals;
}

std::vector<double> MollifiedKernel::group_values(const Vec& x, const Vec& h, int groups) const {
  if (groups < 2) throw std::invalid_argument("group_values: need at least 2 groups");
  const std::size_t m = mu_->path_count();
  std::vector<double> num(groups, 0.0), den(groups, 0.0);
  const double eps = mollifier_.eps;
  const auto lo = std::lower_bound(atoms_.begin(), atoms_.end(), x[0] - eps,
                                   [](const Atom& a, double v) { return a.y0 < v; });
  const auto hi = std::upper_bound(lo, atoms_.end(), x[0] + eps,
                                   [](double v, const Atom& a) { return v < a.y0; });
  for (auto it = lo; it != hi; ++it) {
    const double u2 = norm2(sub(x, it->y), bounds_.d) / (eps * eps);
    if (u2 >= 1.0) continue;
    const int g = static_cast<int>(static_cast<std::size_t>(it->path) * groups / m);
    const double wphi = it->w * mollifier_.profile(u2);
    den[g] += wphi;
    num[g] += wphi * (state_only_base_ ? it->state_value : base_->bounded_intensity(it->y, h));
  }
  const double base_value = base_->bounded_intensity(x, h);
  const double rho_g = regularizer_ / groups;
  std::vector<double> values(groups);
  for (int g = 0; g < groups; ++g) {
    values[g] = (num[g] + rho_g * base_value) / (den[g] + rho_g);
  }
  return values;
}

namespace {

// Piecewise-linear table of a state-only bounded intensity; node values are
// exact mollified evaluations, so every interpolated value stays a convex
// combination of base-kernel values.
class TabulatedStateKernel : public JumpKernel {
 public:
  TabulatedStateKernel(KernelPtr base, double lo, double dx, std::vector<double> values)
      : JumpKernel(base->bounds(), KernelFamily::kMollified),
        base_(std::move(base)),
        lo_(lo),
        dx_(dx),
        values_(std::move(values)) {}

  IntensityDependence dependence() const override { return IntensityDependence::kStateOnly; }

  double bounded_intensity(const Vec& x, const Vec&) const override {
    const double pos = (x[0] - lo_) / dx_;
    if (pos <= 0.0 || pos >= static_cast<double>(values_.size() - 1)) {
      return base_->bounded_intensity(x, x);  // outside the covered range: pure regularizer
    }
    const auto j = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(j);
    return values_[j] + frac * (values_[j + 1] - values_[j]);
  }

  double mean_bounded_intensity(const Vec& x) const override { return bounded_intensity(x, x); }

 private:
  KernelPtr base_;
  double lo_;
  double dx_;
  std::vector<double> values_;
};

}  // namespace

KernelPtr MollifiedKernel::make_sampling_interpolant(double spacing_factor) const {
  if (bounds_.d != 1) {
    throw std::logic_error("make_sampling_interpolant: only d = 1 is tabulated");
  }
  if (!state_only_base_) {
    throw std::logic_error("make_sampling_interpolant: base must be state-only");
  }
  if (atoms_.empty()) {
    return base_;
  }
  const double eps = mollifier_.eps;
  const double lo = atoms_.front().y0 - eps;
  const double hi = atoms_.back().y0 + eps;
  const double dx = eps * spacing_factor;
  const auto nodes = static_cast<std::size_t>(std::ceil((hi - lo) / dx)) + 2;
  std::vector<double> values(nodes);
  // exact evaluation at every node via a sliding atom window
  std::size_t win_lo = 0, win_hi = 0;
  for (std::size_t j = 0; j < nodes; ++j) {
    const double xj = lo + static_cast<double>(j) * dx;
    while (win_lo < atoms_.size() && atoms_[win_lo].y0 < xj - eps) ++win_lo;
    if (win_hi < win_lo) win_hi = win_lo;
    while (win_hi < atoms_.size() && atoms_[win_hi].y0 <= xj + eps) ++win_hi;
    double num = 0.0, den = 0.0;
    for (std::size_t k = win_lo; k < win_hi; ++k) {
      const double dy = xj - atoms_[k].y0;
      const double u2 = dy * dy / (eps * eps);
      if (u2 >= 1.0) continue;
      const double wphi = atoms_[k].w * mollifier_.profile(u2);
      den += wphi;
      num += wphi * atoms_[k].state_value;
    }
    const Vec xv = make_vec(xj);
    const double base_value = base_->bounded_intensity(xv, xv);
    values[j] = (num + regularizer_ * base_value) / (den + regularizer_);
  }
  return std::make_shared<TabulatedStateKernel>(base_, lo, dx, std::move(values));
}

std::vector<ConvergenceRow> resolvent_convergence_check(
    const KernelPtr& base, const Vec& x0, const ScalarField& f, double lambda,
    const std::vector<double>& eps_list, const SimConfig& resolvent_cfg, const SimConfig& mu_cfg,
    std::uint64_t n_paths, std::uint64_t m_paths, int workers) {
  if (eps_list.empty()) throw std::invalid_argument("resolvent_convergence_check: empty eps list");
  for (std::size_t i = 0; i + 1 < eps_list.size(); ++i) {
    if (!(eps_list[i] > eps_list[i + 1])) {
      throw std::invalid_argument("resolvent_convergence_check: eps_list must be decreasing");
    }
  }
  const int d = base->bounds().d;

  const std::vector<double> base_values =
      resolvent_samples(*base, x0, f, lambda, resolvent_cfg, n_paths, workers);
  double base_mean = 0.0;
  for (double v : base_values) base_mean += v;
  base_mean /= static_cast<double>(n_paths);

  std::vector<ConvergenceRow> rows;
  rows.reserve(eps_list.size());
  for (std::size_t e = 0; e < eps_list.size(); ++e) {
    const double eps = eps_list[e];
    SimConfig mu_run = mu_cfg;
    mu_run.master_seed = mu_cfg.master_seed ^ kMuSeedSalt ^ (0x9E3779B9ull * (e + 1));
    auto mu = std::make_shared<const OccupationMeasure>(
        estimate_mu(*base, x0, lambda, mu_run, m_paths, workers));
    const auto mollified = std::make_shared<MollifiedKernel>(base, mu, eps);
    const KernelPtr sampling_kernel =
        (d == 1 && base->dependence() == IntensityDependence::kStateOnly)
            ? mollified->make_sampling_interpolant()
            : mollified;

    std::vector<double> mollified_values(n_paths);
    parallel_for(n_paths, workers, [&](std::size_t i) {
      RngStream offset_rng(resolvent_cfg.master_seed ^ kOffsetSeedSalt, i, kPurposeOffsets);
      const Vec z = sample_mollifier_offset(mollified->mollifier(), offset_rng);
      const Vec start = sub(x0, scale(z, eps));
      const PathSkeleton path = simulate_path(*sampling_kernel, start, resolvent_cfg, i);
      mollified_values[i] = path_resolvent(path, f, lambda, d);
    });

    double diff_mean = 0.0;
    for (std::size_t i = 0; i < n_paths; ++i) diff_mean += mollified_values[i] - base_values[i];
    diff_mean /= static_cast<double>(n_paths);
    double diff_ss = 0.0;
    for (std::size_t i = 0; i < n_paths; ++i) {
      const double dv = mollified_values[i] - base_values[i] - diff_mean;
      diff_ss += dv * dv;
    }
    const double nd = static_cast<double>(n_paths);
    ConvergenceRow row;
    row.eps = eps;
    row.estimate = base_mean + diff_mean;
    row.reference = base_mean;
    row.abs_error = std::abs(diff_mean);
    row.combined_se = std::sqrt(diff_ss / (nd * (nd - 1.0)));
    // probe support coverage on the exact kernel at a spread of start offsets
    {
      RngStream probe_rng(resolvent_cfg.master_seed ^ kOffsetSeedSalt, n_paths, kPurposeOffsets);
      const Vec h_probe = make_vec(1.0);
      for (int p = 0; p < 256; ++p) {
        const Vec z = sample_mollifier_offset(mollified->mollifier(), probe_rng);
        (void)mollified->bounded_intensity(sub(x0, scale(z, eps)), h_probe);
      }
      row.support_failure_fraction = mollified->support_failure_fraction();
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<KernelErrorRow> kernel_convergence_check(const KernelPtr& base,
                                                     const OccupationMeasurePtr& mu,
                                                     const std::vector<double>& eps_list,
                                                     const std::vector<Vec>& x_grid,
                                                     const std::vector<Vec>& h_grid,
                                                     int se_groups) {
  if (x_grid.empty() || h_grid.empty()) {
    throw std::invalid_argument("kernel_convergence_check: empty grid");
  }
  std::vector<KernelErrorRow> rows;
  rows.reserve(eps_list.size());
  for (const double eps : eps_list) {
    const MollifiedKernel mollified(base, mu, eps);
    KernelErrorRow row;
    row.eps = eps;
    Vec argmax_h = zero_vec();
    for (const Vec& x : x_grid) {
      for (const Vec& h : h_grid) {
        const double err =
            std::abs(mollified.bounded_intensity(x, h) - base->bounded_intensity(x, h));
        if (err > row.sup_error) {
          row.sup_error = err;
          row.argmax_x = x;
          argmax_h = h;
        }
      }
    }
    row.support_failure_fraction = mollified.support_failure_fraction();
    if (row.support_failure_fraction >= 0.01) {
      throw SupportCoverageError(
          "kernel_convergence_check: more than 1% of grid evaluations lack occupation support; "
          "increase the ensemble size M or shrink the probe grid");
    }
    const auto groups = mollified.group_values(row.argmax_x, argmax_h, se_groups);
    double gm = 0.0;
    for (double g : groups) gm += g;
    gm /= static_cast<double>(groups.size());
    double gss = 0.0;
    for (double g : groups) gss += (g - gm) * (g - gm);
    const double gn = static_cast<double>(groups.size());
    row.se_at_argmax = std::sqrt(gss / (gn * (gn - 1.0)));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace stablelike
