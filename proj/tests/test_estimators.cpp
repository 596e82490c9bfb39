#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stablelike/estimators.hpp"
#include "stablelike/oracles.hpp"

using namespace stablelike;

namespace {

SimConfig drop_cfg(double eps_cut, double t_max, std::uint64_t seed) {
  SimConfig cfg;
  cfg.eps_cut = eps_cut;
  cfg.t_max = t_max;
  cfg.small_jump_mode = SmallJumpMode::kDrop;
  cfg.master_seed = seed;
  return cfg;
}

ScalarField constant_field(double v) {
  return {[v](const Vec&) { return v; }, std::abs(v)};
}

}  // namespace

TEST_CASE("exit time matches the closed form at the center and off-center") {
  const auto kernel = ConstantStableKernel::standard(1, 1.0);
  const SimConfig cfg = drop_cfg(3e-3, 20.0, 1001);
  const Region domain = Ball{zero_vec(), 1.0};
  const std::uint64_t n = 20'000;
  for (double x0 : {0.0, 0.6}) {
    const auto est = exit_time_mean(*kernel, make_vec(x0), domain, cfg, n, 4);
    const double exact = oracles::getoor_exit_mean(1, 1.0, 1.0, make_vec(x0));
    CHECK(std::abs(est.mean - exact) < 4.0 * est.std_error + 0.02 * exact);
    CHECK(est.bias_bound < 0.01);
  }
}

TEST_CASE("exit time means shrink toward zero approaching the boundary") {
  const auto kernel = ConstantStableKernel::standard(1, 1.0);
  const SimConfig cfg = drop_cfg(0.01, 20.0, 55);
  const Region domain = Ball{zero_vec(), 1.0};
  double prev = 1e300;
  for (double x0 : {0.8, 0.9, 0.95}) {
    const auto est = exit_time_mean(*kernel, make_vec(x0), domain, cfg, 4000, 4);
    CHECK(est.mean < prev);
    const double exact = oracles::getoor_exit_mean(1, 1.0, 1.0, make_vec(x0));
    CHECK(std::abs(est.mean - exact) < 4.0 * est.std_error + 0.05 * exact);
    prev = est.mean;
  }
  // the boundary itself is a degenerate start and is rejected
  CHECK_THROWS_AS(exit_time_mean(*kernel, make_vec(1.0), domain, cfg, 100, 1),
                  std::invalid_argument);
}

TEST_CASE("exit-time scaling: E tau(r) ~ r^alpha") {
  for (double alpha : {0.8, 1.5}) {
    const auto kernel = ConstantStableKernel::standard(1, alpha);
    const SimConfig cfg = drop_cfg(0.01, 40.0, 7);
    const auto small = exit_time_mean(*kernel, zero_vec(), Region{Ball{zero_vec(), 1.0}}, cfg,
                                      6000, 4);
    const auto large = exit_time_mean(*kernel, zero_vec(), Region{Ball{zero_vec(), 2.0}}, cfg,
                                      6000, 4);
    const double ratio = large.mean / small.mean;
    const double se_ratio =
        ratio * std::sqrt(std::pow(large.std_error / large.mean, 2) +
                          std::pow(small.std_error / small.mean, 2));
    CHECK(std::abs(ratio - std::pow(2.0, alpha)) < 4.0 * se_ratio + 0.05);
  }
}

TEST_CASE("occupation of the full domain telescopes bit-exactly to the exit time") {
  const ModulatedKernel kernel(1, 1.0, 0.3);
  const SimConfig cfg = drop_cfg(0.01, 10.0, 31337);
  const Region domain = Ball{zero_vec(), 1.0};
  RegionUnion full;
  full.members.push_back(domain);
  const std::uint64_t n = 2000;
  const auto occupations = occupation_time_samples(kernel, zero_vec(), full, domain, cfg, n, 4);
  const auto exits = exit_time_samples(kernel, zero_vec(), domain, cfg, n, 4);
  REQUIRE(occupations.size() == exits.size());
  for (std::size_t i = 0; i < n; ++i) {
    REQUIRE(occupations[i] == exits[i]);  // bit-level
  }
}

TEST_CASE("occupation is monotone in the set, path by path") {
  const auto kernel = ConstantStableKernel::standard(1, 1.0);
  const SimConfig cfg = drop_cfg(0.01, 10.0, 99);
  const Region domain = Cube{zero_vec(), 1.0};
  RegionUnion small, large;
  small.members.push_back(Cube{zero_vec(), 0.4});
  large.members.push_back(Cube{zero_vec(), 0.8});
  const auto occ_small = occupation_time_samples(*kernel, zero_vec(), small, domain, cfg, 2000, 4);
  const auto occ_large = occupation_time_samples(*kernel, zero_vec(), large, domain, cfg, 2000, 4);
  for (std::size_t i = 0; i < occ_small.size(); ++i) {
    REQUIRE(occ_small[i] <= occ_large[i]);
  }
}

TEST_CASE("occupation preconditions and the empty set") {
  const auto kernel = ConstantStableKernel::standard(1, 1.0);
  const SimConfig cfg = drop_cfg(0.01, 5.0, 1);
  const Region domain = Cube{zero_vec(), 1.0};
  const auto empty = occupation_time(*kernel, zero_vec(), RegionUnion{}, domain, cfg, 200, 1);
  CHECK(empty.mean == 0.0);
  CHECK(empty.std_error == 0.0);
  RegionUnion outside;
  outside.members.push_back(Cube{make_vec(5.0), 0.5});
  CHECK_THROWS_AS(occupation_time(*kernel, zero_vec(), outside, domain, cfg, 200, 1),
                  std::invalid_argument);
}

TEST_CASE("occupation of the half-side cube matches the frozen baseline") {
  const auto kernel = ConstantStableKernel::standard(1, 1.0);
  const SimConfig cfg = drop_cfg(0.005, 20.0, 12);
  const Region domain = Cube{zero_vec(), 1.0};
  RegionUnion half;
  half.members.push_back(Cube{zero_vec(), 0.5});
  const auto est = occupation_time(*kernel, zero_vec(), half, domain, cfg, 4000, 4);
  CHECK(est.ci_low() > 0.0);
  // 0.37846(79) from a 2e5-path reference run at eps_cut = 2e-3
  CHECK(std::abs(est.mean - 0.37846) < 4.0 * est.std_error + 0.01);
}

TEST_CASE("resolvent of the constant field telescopes to 1/lambda") {
  const ModulatedKernel kernel(1, 1.0, 0.3);
  const SimConfig cfg = drop_cfg(0.02, 20.0, 321);
  const auto values = resolvent_samples(kernel, zero_vec(), constant_field(1.0), 2.0, cfg, 50, 1);
  for (double v : values) {
    CHECK(std::abs(v - 0.5) < 1e-10);
  }
  const auto zero = resolvent_samples(kernel, zero_vec(), constant_field(0.0), 2.0, cfg, 10, 1);
  for (double v : zero) CHECK(v == 0.0);
}

TEST_CASE("resolvent is linear on shared seeds") {
  const auto kernel = ConstantStableKernel::standard(1, 1.2);
  const SimConfig cfg = drop_cfg(0.02, 15.0, 5);
  RegionUnion box;
  box.members.push_back(Ball{zero_vec(), 1.0});
  const ScalarField f = {[box](const Vec& x) { return box.contains(x, 1) ? 1.0 : 0.0; }, 1.0};
  const ScalarField g = constant_field(1.0);
  const ScalarField combo = {[&](const Vec& x) { return 2.0 * f.f(x) - 0.5 * g.f(x); }, 2.5};
  const std::uint64_t n = 300;
  const auto vf = resolvent_samples(*kernel, zero_vec(), f, 1.0, cfg, n, 2);
  const auto vg = resolvent_samples(*kernel, zero_vec(), g, 1.0, cfg, n, 2);
  const auto vc = resolvent_samples(*kernel, zero_vec(), combo, 1.0, cfg, n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(vc[i] == doctest::Approx(2.0 * vf[i] - 0.5 * vg[i]).epsilon(1e-12));
  }
}

TEST_CASE("resolvent rejects bad rates and discloses the tail") {
  const auto kernel = ConstantStableKernel::standard(1, 1.0);
  const SimConfig cfg = drop_cfg(0.02, 10.0, 5);
  CHECK_THROWS_AS(resolvent(*kernel, zero_vec(), constant_field(1.0), 0.0, cfg, 10, 1),
                  std::invalid_argument);
  const auto est = resolvent(*kernel, zero_vec(), constant_field(1.0), 1.0, cfg, 10, 1);
  CHECK(est.bias_bound == doctest::Approx(std::exp(-10.0)).epsilon(1e-9));
}

TEST_CASE("tube probability: wide tube around a constant curve is near one") {
  const auto kernel = ConstantStableKernel::standard(1, 1.0);
  const SimConfig cfg = drop_cfg(1e-3, 1.0, 2);
  const Polyline phi({{0.0, zero_vec()}, {0.01, zero_vec()}});
  const auto est = tube_probability(*kernel, phi, 10.0, cfg, 2000, 4);
  CHECK(est.mean >= 0.9);
  CHECK(est.method == CiMethod::kWilson);
}

TEST_CASE("tube probability is monotone in eps on shared seeds") {
  const auto kernel = ConstantStableKernel::standard(1, 1.0);
  const SimConfig cfg = drop_cfg(1e-2, 1.0, 44);
  const Polyline phi({{0.0, zero_vec()}, {0.5, make_vec(0.5)}, {1.0, zero_vec()}});
  const auto narrow = tube_probability(*kernel, phi, 0.4, cfg, 3000, 4);
  const auto wide = tube_probability(*kernel, phi, 0.8, cfg, 3000, 4);
  CHECK(narrow.mean <= wide.mean);
  CHECK(narrow.mean >= 0.0);
  CHECK(wide.mean <= 1.0);
}

TEST_CASE("tube probability: zigzag curve is positive and near the frozen baseline") {
  const auto kernel = ConstantStableKernel::standard(1, 1.0);
  const SimConfig cfg = drop_cfg(1e-2, 1.0, 321);
  const Polyline phi({{0.0, zero_vec()}, {0.5, make_vec(0.5)}, {1.0, zero_vec()}});
  const auto est = tube_probability(*kernel, phi, 0.5, cfg, 3000, 4);
  CHECK(est.ci_low() > 0.0);
  // 0.05814(74) from a 1e5-path reference run at eps_cut = 1e-3
  CHECK(std::abs(est.mean - 0.05814) < 4.0 * est.std_error + 0.015);
}

TEST_CASE("resolvent agrees with the exact-increment grid oracle") {
  // independent route: exact stable increments on a time grid + Riemann sum,
  // no thinning anywhere
  const auto kernel = ConstantStableKernel::standard(1, 1.0);
  const SimConfig cfg = drop_cfg(5e-3, 12.0, 808);
  RegionUnion C;
  C.members.push_back(Ball{zero_vec(), 1.0});
  const ScalarField f = {[C](const Vec& x) { return C.contains(x, 1) ? 1.0 : 0.0; }, 1.0};
  const auto est = resolvent(*kernel, zero_vec(), f, 1.0, cfg, 10000, 4);

  const double dt = 2e-3, horizon = 12.0;
  const std::size_t n = 3000;
  const auto steps = static_cast<std::size_t>(horizon / dt);
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream rng(505, i);
    double x = 0.0, acc = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
      acc += std::exp(-static_cast<double>(k) * dt) * (std::abs(x) <= 1.0 ? 1.0 : 0.0) * dt;
      x += oracles::stable_increment_1d(1.0, dt, rng);
    }
    vals[i] = acc;
  }
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / (static_cast<double>(n) * (n - 1.0)));
  const double combined = std::sqrt(est.std_error * est.std_error + se * se);
  // 0.60389 vs 0.60079 at reference scale; allow the O(dt) Riemann slack
  CHECK(std::abs(est.mean - mean) < 4.0 * combined + 0.01);
}

TEST_CASE("hitting probability: container itself is hit instantly") {
  const auto kernel = ConstantStableKernel::standard(1, 1.0);
  const SimConfig cfg = drop_cfg(0.01, 5.0, 8);
  const Region container = Ball{zero_vec(), 3.0};
  RegionUnion everything;
  everything.members.push_back(container);
  const auto est = hitting_probability(*kernel, make_vec(0.5), everything, container, cfg, 500, 2);
  CHECK(est.mean == 1.0);
}

TEST_CASE("hitting probability: empty target is exactly zero with a zero-width interval") {
  const auto kernel = ConstantStableKernel::standard(1, 1.0);
  const SimConfig cfg = drop_cfg(0.01, 5.0, 8);
  const auto est = hitting_probability(*kernel, make_vec(0.5), RegionUnion{},
                                       Region{Ball{zero_vec(), 3.0}}, cfg, 500, 1);
  CHECK(est.mean == 0.0);
  CHECK(est.std_error == 0.0);
}

TEST_CASE("hitting probability: off-target start still hits with positive probability") {
  const auto kernel = ConstantStableKernel::standard(1, 1.0);
  const SimConfig cfg = drop_cfg(0.01, 30.0, 9);
  RegionUnion target;
  target.members.push_back(Ball{zero_vec(), 1.0});
  const auto est = hitting_probability(*kernel, make_vec(2.0), target,
                                       Region{Ball{zero_vec(), 3.0}}, cfg, 4000, 4);
  CHECK(est.ci_low() > 0.0);
  CHECK(est.mean < 1.0);
  // 0.41357(110) from a 2e5-path reference run at eps_cut = 5e-3, t_max = 60
  CHECK(std::abs(est.mean - 0.41357) < 4.0 * est.std_error + 0.02);
}

TEST_CASE("wilson intervals never degenerate and stay inside [0,1]") {
  const auto zero = wilson_interval(0, 100);
  CHECK(zero.first == 0.0);
  CHECK(zero.second > 0.0);
  const auto full = wilson_interval(100, 100);
  CHECK(full.first < 1.0);
  CHECK(full.second == 1.0);
  const auto mid = wilson_interval(50, 100);
  CHECK(mid.first > 0.0);
  CHECK(mid.second < 1.0);
  CHECK(mid.first < 0.5);
  CHECK(mid.second > 0.5);
}

TEST_CASE("estimates are identical for any worker count") {
  const ModulatedKernel kernel(1, 1.0, 0.3);
  const SimConfig cfg = drop_cfg(0.01, 10.0, 777);
  const Region domain = Ball{zero_vec(), 1.0};
  const auto serial = exit_time_mean(kernel, zero_vec(), domain, cfg, 800, 1);
  const auto parallel = exit_time_mean(kernel, zero_vec(), domain, cfg, 800, 8);
  CHECK(serial.mean == parallel.mean);
  CHECK(serial.std_error == parallel.std_error);
  CHECK(serial.bias_bound == parallel.bias_bound);
}
