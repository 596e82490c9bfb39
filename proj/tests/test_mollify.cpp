#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stablelike/errors.hpp"
#include "stablelike/estimators.hpp"
#include "stablelike/mollify.hpp"
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

// Simpson quadrature of the radial profile over the support.
double mollifier_integral(const Mollifier& m) {
  const int n = 4000;
  const double dr = m.eps / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = i * dr;
    const double u2 = (r / m.eps) * (r / m.eps);
    const double value = m.profile(u2) / std::pow(m.eps, m.d) *
                         (m.d == 1 ? 2.0 : sphere_surface_area(m.d) * std::pow(r, m.d - 1));
    const double weight = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += weight * value;
  }
  return acc * dr / 3.0;
}

}  // namespace

TEST_CASE("mollifier: pinned normalizing constant and scaling") {
  CHECK(mollifier_normalizing_constant(1) == doctest::Approx(35.0 / 32.0).epsilon(1e-12));
  const Mollifier m = build_mollifier(1, 0.25);
  CHECK(m(zero_vec()) == doctest::Approx((35.0 / 32.0) / 0.25).epsilon(1e-12));
  CHECK(m(make_vec(0.25)) == 0.0);
  CHECK(m(make_vec(0.3)) == 0.0);
  CHECK(m(make_vec(0.2499)) > 0.0);
  CHECK_THROWS_AS(build_mollifier(1, 0.0), std::domain_error);
}

TEST_CASE("mollifier integrates to one in every supported dimension") {
  for (int d : {1, 2, 3}) {
    const Mollifier m = build_mollifier(d, d == 2 ? 0.4 : 1.3);
    CHECK(mollifier_integral(m) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("mollifier offsets follow the bump profile") {
  const Mollifier m = build_mollifier(1, 0.1);
  RngStream rng(5, 0);
  const std::size_t n = 100'000;
  double mean = 0.0, second = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec z = sample_mollifier_offset(m, rng);
    REQUIRE(std::abs(z[0]) < 1.0);
    mean += z[0];
    second += z[0] * z[0];
  }
  mean /= static_cast<double>(n);
  second /= static_cast<double>(n);
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  // int z^2 phi(z) dz = 1/9 for the cubic bump in d = 1
  CHECK(std::abs(second - 1.0 / 9.0) < 4.0 * 0.15 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("occupation ensemble: mass telescopes to the discounted horizon") {
  const auto kernel = ConstantStableKernel::standard(1, 1.0);
  const SimConfig cfg = drop_cfg(0.05, 20.0, 4242);
  for (double lambda : {0.5, 1.0, 2.0}) {
    const OccupationMeasure mu = estimate_mu(*kernel, zero_vec(), lambda, cfg, 200, 4);
    const double expected = (1.0 - std::exp(-lambda * cfg.t_max)) / lambda;
    CHECK(mu.total_mass == doctest::Approx(expected).epsilon(1e-15));
    CHECK(std::abs(mu.total_mass - 1.0 / lambda) <= mu.tail_bound() + 1e-15);
    // atom weights really sum to the closed form, path by path
    for (std::size_t p = 0; p < 5; ++p) {
      double sum = 0.0;
      for (const auto& atom : mu.paths[p]) sum += atom.w;
      CHECK(sum == doctest::Approx(expected).epsilon(1e-10));
      for (const auto& atom : mu.paths[p]) REQUIRE(atom.w > 0.0);
    }
  }
}

TEST_CASE("occupation ensemble: queries") {
  const auto kernel = ConstantStableKernel::standard(1, 1.0);
  const SimConfig cfg = drop_cfg(0.05, 15.0, 777);
  const OccupationMeasure mu = estimate_mu(*kernel, zero_vec(), 1.0, cfg, 300, 4);
  RegionUnion far;
  far.members.push_back(Ball{make_vec(1e6), 1.0});
  CHECK(mu.measure(far) == 0.0);
  RegionUnion everything;
  everything.members.push_back(Ball{zero_vec(), 1e9});
  CHECK(mu.measure(everything) == doctest::Approx(mu.total_mass).epsilon(1e-9));
}

TEST_CASE("mu agrees with the resolvent estimator on shared seeds") {
  const auto kernel = ConstantStableKernel::standard(1, 1.0);
  const SimConfig cfg = drop_cfg(0.02, 20.0, 2024);
  const std::uint64_t n = 400;
  const OccupationMeasure mu = estimate_mu(*kernel, zero_vec(), 1.0, cfg, n, 4);
  RegionUnion C;
  C.members.push_back(Ball{zero_vec(), 1.0});
  const ScalarField f = {[C](const Vec& x) { return C.contains(x, 1) ? 1.0 : 0.0; }, 1.0};
  const auto res = resolvent(*kernel, zero_vec(), f, 1.0, cfg, n, 4);
  CHECK(mu.measure(C) == doctest::Approx(res.mean).epsilon(1e-12));
}

TEST_CASE("mu charges every modest ball near the start") {
  const auto kernel = ConstantStableKernel::standard(1, 1.0);
  const SimConfig cfg = drop_cfg(0.02, 15.0, 99);
  const OccupationMeasure mu = estimate_mu(*kernel, zero_vec(), 1.0, cfg, 10000, 4);
  for (double center : {-1.9, -1.5, -0.7, 0.0, 0.7, 1.5, 1.9}) {
    RegionUnion C;
    C.members.push_back(Ball{make_vec(center), 0.1});
    const auto [hits, total] = mu.paths_charging(C);
    CHECK(wilson_interval(hits, total).first > 0.0);
  }
}

TEST_CASE("mollified constant kernel collapses to the base") {
  const auto base = ConstantStableKernel::standard(1, 1.0);
  const SimConfig cfg = drop_cfg(0.05, 10.0, 31);
  const auto mu = std::make_shared<const OccupationMeasure>(
      estimate_mu(*base, zero_vec(), 1.0, cfg, 200, 2));
  const MollifiedKernel mk(base, mu, 0.2);
  for (double x : {-0.8, 0.0, 0.3, 1.1}) {
    for (double h : {0.2, 1.0, 4.0}) {
      CHECK(mk.evaluate(make_vec(x), make_vec(h)) ==
            doctest::Approx(base->evaluate(make_vec(x), make_vec(h))).epsilon(1e-13));
    }
  }
}

TEST_CASE("mollified kernel far from the ensemble support falls back to the base") {
  const auto base = std::make_shared<const ModulatedKernel>(1, 1.0, 0.3);
  const SimConfig cfg = drop_cfg(0.05, 10.0, 7);
  const auto mu = std::make_shared<const OccupationMeasure>(
      estimate_mu(*base, zero_vec(), 1.0, cfg, 100, 2));
  const MollifiedKernel mk(base, mu, 0.2);
  const Vec far = make_vec(1e7);
  const std::uint64_t before = mk.support_failure_count();
  CHECK(mk.evaluate(far, make_vec(1.0)) ==
        doctest::Approx(base->evaluate(far, make_vec(1.0))).epsilon(1e-13));
  CHECK(mk.support_failure_count() == before + 1);
}

TEST_CASE("mollified value is a convex combination of nearby base values") {
  const auto base = std::make_shared<const ModulatedKernel>(1, 1.0, 0.3);
  const SimConfig cfg = drop_cfg(0.05, 10.0, 61);
  const auto mu = std::make_shared<const OccupationMeasure>(
      estimate_mu(*base, zero_vec(), 1.0, cfg, 500, 2));
  const double eps = 0.2;
  const MollifiedKernel mk(base, mu, eps);
  const Vec x = zero_vec();
  const Vec h = make_vec(1.0);
  const double value = mk.bounded_intensity(x, h);
  // direct enumeration over the raw ensemble as the oracle
  double m_min = base->modulation(x), m_max = m_min;
  double num = 0.0, den = 0.0;
  const Mollifier phi = build_mollifier(1, eps);
  for (const auto& path : mu->paths) {
    for (const auto& atom : path) {
      if (std::abs(atom.y[0] - x[0]) >= eps) continue;
      const double m = base->modulation(atom.y);
      m_min = std::min(m_min, m);
      m_max = std::max(m_max, m);
      const double w = atom.w * phi.profile((atom.y[0] - x[0]) * (atom.y[0] - x[0]) / (eps * eps));
      num += w * m;
      den += w;
    }
  }
  CHECK(value >= m_min - 1e-12);
  CHECK(value <= m_max + 1e-12);
  const double rho = mk.regularizer_weight();
  CHECK(value == doctest::Approx((num + rho * base->modulation(x)) / (den + rho)).epsilon(1e-10));
}

TEST_CASE("mollified kernel inherits the bounds and h-symmetry exactly") {
  const auto base = std::make_shared<const ModulatedKernel>(1, 1.0, 0.3);
  const SimConfig cfg = drop_cfg(0.05, 10.0, 17);
  const auto mu = std::make_shared<const OccupationMeasure>(
      estimate_mu(*base, zero_vec(), 1.0, cfg, 1000, 4));
  const double kappa = base->bounds().kappa;
  for (double eps : {0.4, 0.1}) {
    const MollifiedKernel mk(base, mu, eps);
    for (int i = 0; i < 16; ++i) {
      const Vec x = make_vec(-1.0 + 2.0 * i / 15.0);
      for (int j = 0; j < 8; ++j) {
        const Vec h = make_vec(0.05 * std::pow(10.0, j * 0.35));
        const double v = mk.bounded_intensity(x, h);
        REQUIRE(v >= kappa);
        REQUIRE(v <= 1.0 / kappa);
        REQUIRE(mk.bounded_intensity(x, negate(h)) == v);
      }
    }
  }
}

TEST_CASE("group values average back to the full ratio") {
  const auto base = std::make_shared<const ModulatedKernel>(1, 1.0, 0.3);
  const SimConfig cfg = drop_cfg(0.05, 10.0, 23);
  const auto mu = std::make_shared<const OccupationMeasure>(
      estimate_mu(*base, zero_vec(), 1.0, cfg, 1000, 4));
  const MollifiedKernel mk(base, mu, 0.3);
  const auto groups = mk.group_values(make_vec(0.2), make_vec(1.0), 10);
  REQUIRE(groups.size() == 10);
  double mean = 0.0;
  for (double g : groups) mean += g;
  mean /= 10.0;
  CHECK(mean == doctest::Approx(mk.bounded_intensity(make_vec(0.2), make_vec(1.0))).epsilon(0.05));
}

TEST_CASE("sampling interpolant tracks the exact mollified intensity") {
  const auto base = std::make_shared<const ModulatedKernel>(1, 1.0, 0.3);
  const SimConfig cfg = drop_cfg(0.05, 10.0, 11);
  const auto mu = std::make_shared<const OccupationMeasure>(
      estimate_mu(*base, zero_vec(), 1.0, cfg, 1000, 4));
  const MollifiedKernel mk(base, mu, 0.2);
  const auto table = mk.make_sampling_interpolant();
  const double kappa = base->bounds().kappa;
  double worst = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const Vec x = make_vec(-2.0 + 4.0 * i / 200.0);
    const double exact = mk.bounded_intensity(x, make_vec(1.0));
    const double approx = table->bounded_intensity(x, make_vec(1.0));
    REQUIRE(approx >= kappa);
    REQUIRE(approx <= 1.0 / kappa);
    worst = std::max(worst, std::abs(exact - approx));
  }
  CHECK(worst < 5e-3);  // node spacing eps/16 on a Lipschitz-0.9 modulation
}

TEST_CASE("resolvent convergence: constant field gives an exactly zero difference") {
  const auto base = ConstantStableKernel::standard(1, 1.0);
  const SimConfig res_cfg = drop_cfg(0.05, 12.0, 2718);
  const SimConfig mu_cfg = drop_cfg(0.1, 8.0, 2718);
  const ScalarField one = {[](const Vec&) { return 1.0; }, 1.0};
  const auto rows =
      resolvent_convergence_check(base, zero_vec(), one, 1.0, {0.4, 0.1}, res_cfg, mu_cfg, 300,
                                  300, 4);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.abs_error < 1e-10);
    CHECK(row.support_failure_fraction < 0.01);
  }
}

TEST_CASE("resolvent convergence rejects a non-decreasing eps list") {
  const auto base = ConstantStableKernel::standard(1, 1.0);
  const SimConfig cfg = drop_cfg(0.05, 5.0, 3);
  const ScalarField one = {[](const Vec&) { return 1.0; }, 1.0};
  CHECK_THROWS_AS(resolvent_convergence_check(base, zero_vec(), one, 1.0, {0.1, 0.4}, cfg, cfg,
                                              50, 50, 1),
                  std::invalid_argument);
}

TEST_CASE("kernel convergence: constant base has vanishing error, modulated base a real trend") {
  const SimConfig mu_cfg = drop_cfg(0.1, 10.0, 424242);
  const auto x_grid = [] {
    std::vector<Vec> g;
    for (int i = 0; i < 16; ++i) g.push_back(make_vec(-1.0 + 2.0 * i / 15.0));
    return g;
  }();
  const std::vector<Vec> h_grid = {make_vec(0.5), make_vec(-0.5), make_vec(2.0), make_vec(-2.0)};

  const auto constant = ConstantStableKernel::standard(1, 1.0);
  const auto mu_const = std::make_shared<const OccupationMeasure>(
      estimate_mu(*constant, zero_vec(), 1.0, mu_cfg, 2000, 4));
  for (const auto& row :
       kernel_convergence_check(constant, mu_const, {0.4, 0.1}, x_grid, h_grid)) {
    CHECK(row.sup_error < 1e-12);
  }

  const auto modulated = std::make_shared<const ModulatedKernel>(1, 1.0, 0.3);
  const auto mu_mod = std::make_shared<const OccupationMeasure>(
      estimate_mu(*modulated, zero_vec(), 1.0, mu_cfg, 8000, 4));
  const auto rows = kernel_convergence_check(modulated, mu_mod, {0.4, 0.2, 0.1}, x_grid, h_grid);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].sup_error > rows[2].sup_error);
}

TEST_CASE("kernel convergence refuses probes outside the visited region") {
  const auto base = std::make_shared<const ModulatedKernel>(1, 1.0, 0.3);
  const SimConfig cfg = drop_cfg(0.1, 5.0, 5);
  const auto mu = std::make_shared<const OccupationMeasure>(
      estimate_mu(*base, zero_vec(), 1.0, cfg, 200, 2));
  const std::vector<Vec> far_grid = {make_vec(1e5), make_vec(2e5)};
  const std::vector<Vec> h_grid = {make_vec(1.0)};
  CHECK_THROWS_AS(kernel_convergence_check(base, mu, {0.2}, far_grid, h_grid),
                  SupportCoverageError);
}

TEST_CASE("convolution against the mollifier converges at the Lipschitz rate") {
  const ScalarField tent = {[](const Vec& x) { return std::max(0.0, 1.0 - std::abs(x[0])); }, 1.0};
  for (double eps : {0.4, 0.1}) {
    const Mollifier m = build_mollifier(1, eps);
    RngStream rng(8, 0);
    const std::size_t n = 20'000;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec z = sample_mollifier_offset(m, rng);
      acc += tent.f(make_vec(0.3 - eps * z[0]));
    }
    acc /= static_cast<double>(n);
    const double f0 = tent.f(make_vec(0.3));
    CHECK(std::abs(acc - f0) <= eps + 4.0 / std::sqrt(static_cast<double>(n)));
  }
}
