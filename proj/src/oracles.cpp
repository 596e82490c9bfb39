#include "stablelike/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stablelike::oracles {

double getoor_constant(int d, double alpha) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("getoor_constant: d must be in [1,3]");
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::invalid_argument("getoor_constant: alpha must be in (0,2)");
  }
  return std::tgamma(0.5 * d) /
         (std::pow(2.0, alpha) * std::tgamma(1.0 + 0.5 * alpha) * std::tgamma(0.5 * (d + alpha)));
}

double getoor_exit_mean(int d, double alpha, double r, const Vec& x) {
  if (!(r > 0.0)) throw std::invalid_argument("getoor_exit_mean: r must be > 0");
  const double xn = norm(x, d);
  if (xn > r) throw std::domain_error("getoor_exit_mean: |x| > r");
  return getoor_constant(d, alpha) * std::pow(std::max(0.0, r * r - xn * xn), 0.5 * alpha);
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::domain_error("stable_increment: alpha must be in (0,2)");
  }
}

// Chambers-Mallows-Stuck, symmetric case: X with E exp(i xi X) = exp(-|xi|^alpha).
double cms_symmetric(double alpha, RngStream& rng) {
  const double v = M_PI * (rng.uniform() - 0.5);  // Uniform(-pi/2, pi/2)
  double w = rng.exponential();
  while (w == 0.0) w = rng.exponential();
  if (std::abs(alpha - 1.0) < 1e-12) return std::tan(v);
  const double cv = std::cos(v);
  const double t1 = std::sin(alpha * v) / std::pow(cv, 1.0 / alpha);
  const double t2 = std::pow(std::cos(v - alpha * v) / w, (1.0 - alpha) / alpha);
  return t1 * t2;
}

}  // namespace

double positive_stable(double rho, RngStream& rng) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::domain_error("positive_stable: rho must be in (0,1)");
  }
  // Totally skewed CMS with the scale prefactor cancelled so that
  // E exp(-u S) = exp(-u^rho).
  const double v = M_PI * (rng.uniform() - 0.5);
  double w = rng.exponential();
  while (w == 0.0) w = rng.exponential();
  const double shifted = rho * (v + 0.5 * M_PI);
  const double t1 = std::sin(shifted) / std::pow(std::cos(v), 1.0 / rho);
  const double t2 = std::pow(std::cos(v - shifted) / w, (1.0 - rho) / rho);
  return t1 * t2;
}

double stable_increment_1d(double alpha, double t, RngStream& rng) {
  check_alpha(alpha);
  if (!(t > 0.0)) throw std::domain_error("stable_increment: t must be > 0");
  return std::pow(t, 1.0 / alpha) * cms_symmetric(alpha, rng);
}

Vec stable_increment(int d, double alpha, double t, RngStream& rng) {
  check_alpha(alpha);
  if (!(t > 0.0)) throw std::domain_error("stable_increment: t must be > 0");
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("stable_increment: d must be in [1,3]");
  Vec out = zero_vec();
  if (d == 1) {
    out[0] = stable_increment_1d(alpha, t, rng);
    return out;
  }
  // X_t = B_{S} with B Brownian motion of generator Laplacian (per-axis
  // variance 2s) and S a positive (alpha/2)-stable time scaled by t^{2/alpha},
  // giving E exp(i xi . X_t) = exp(-t |xi|^alpha).
  const double s = std::pow(t, 2.0 / alpha) * positive_stable(0.5 * alpha, rng);
  const double sd = std::sqrt(2.0 * s);
  for (int i = 0; i < d; ++i) out[i] = sd * rng.normal();
  return out;
}

OracleReport ks_two_sample(std::vector<double> a, std::vector<double> b, double significance) {
  if (a.size() < 25 || b.size() < 25) {
    throw std::invalid_argument("ks_two_sample: need at least 25 samples per side");
  }
  if (!(significance > 0.0 && significance < 1.0)) {
    throw std::invalid_argument("ks_two_sample: significance must be in (0,1)");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double stat = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    const double v = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= v) ++ia;
    while (ib < b.size() && b[ib] <= v) ++ib;
    stat = std::max(stat, std::abs(ia / na - ib / nb));
  }
  OracleReport report;
  report.statistic = stat;
  report.critical_value =
      std::sqrt(-0.5 * std::log(0.5 * significance)) * std::sqrt((na + nb) / (na * nb));
  report.pass = stat < report.critical_value;
  report.n_a = a.size();
  report.n_b = b.size();
  return report;
}

}  // namespace stablelike::oracles
