#pragma once

// Independent exact references for the constant-kernel (symmetric stable)
// case: closed-form exit times, direct stable-increment samplers, and a
// two-sample Kolmogorov-Smirnov test. Everything here targets the standard
// normalization (Fourier symbol -|xi|^alpha), the same constant the kernels
// module uses for its "standard" family.

#include <cstdint>
#include <vector>

#include "stablelike/geometry.hpp"
#include "stablelike/rng.hpp"

namespace stablelike::oracles {

// Expected exit time of the standard isotropic alpha-stable process from
// ball(0, r) started at x: C(d,alpha) * (r^2 - |x|^2)^{alpha/2} with
// C(d,alpha) = Gamma(d/2) / (2^alpha * Gamma(1+alpha/2) * Gamma((d+alpha)/2)).
double getoor_exit_mean(int d, double alpha, double r, const Vec& x);
double getoor_constant(int d, double alpha);

// One increment at time t of the standard symmetric alpha-stable process
// in R^d (characteristic function exp(-t |xi|^alpha)).
// d = 1 uses the Chambers-Mallows-Stuck transform; d >= 2 subordinates a
// Gaussian by a positive (alpha/2)-stable time.
Vec stable_increment(int d, double alpha, double t, RngStream& rng);
double stable_increment_1d(double alpha, double t, RngStream& rng);

// Positive rho-stable variable with Laplace transform exp(-u^rho), rho in (0,1).
double positive_stable(double rho, RngStream& rng);

struct OracleReport {
  double statistic = 0.0;
  double critical_value = 0.0;
  bool pass = false;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic critical value
// c(sig) * sqrt((n+m)/(n*m)), c(sig) = sqrt(-log(sig/2)/2).
// Requires both samples to have at least 25 entries.
OracleReport ks_two_sample(std::vector<double> a, std::vector<double> b, double significance);

}  // namespace stablelike::oracles
