#pragma once

// Statement-by-statement statistical verification suites. Positivity claims
// are operationalized as "the 95% lower confidence bound is > 0"; scaling and
// convergence claims as agreement within stated multiples of the standard
// error. Every suite is reproducible bit-for-bit from its seed and parameter
// digest, and each emits at least one check with a nonzero sample count.

#include <cstdint>
#include <string>
#include <vector>

#include "stablelike/estimators.hpp"
#include "stablelike/geometry.hpp"
#include "stablelike/kernels.hpp"
#include "stablelike/mollify.hpp"
#include "stablelike/sampler.hpp"

namespace stablelike {

struct VerificationCheck {
  std::string description;
  double observed = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct EstimateRecord {
  std::string label;
  EstimateWithCI estimate;
};

struct VerificationResult {
  std::string suite;  // content-named identifier of the verified statement
  std::vector<VerificationCheck> checks;
  std::vector<EstimateRecord> raw_estimates;
  bool overall = false;
  std::uint64_t master_seed = 0;
  std::string params_digest;

  void finalize();  // overall := conjunction of checks
  std::string to_json() const;
  // label,mean,std_error,n_samples,method,bias_bound rows
  std::vector<std::vector<std::string>> raw_csv_rows() const;
};

// E tau(ball(0,r)) / r^alpha is constant over r for the constant-stable
// family; checked pairwise within 4 combined standard errors plus positivity
// of every estimate. Rejects non-constant families.
VerificationResult verify_exit_scaling(const KernelPtr& kernel, const std::vector<double>& r_list,
                                       const SimConfig& cfg, std::uint64_t n_paths,
                                       int workers = 1);

// P^y(hit A before exiting ball(center,3)) has a positive lower bound
// proportional to |A|: checks the Wilson lower bound of every estimate and of
// the min ratio estimate/|A|, plus exact nested-set monotonicity on shared
// seeds. A_list entries must be nested and shrinking, inside ball(center,1);
// y_list inside ball(center,2).
VerificationResult verify_hitting_bound(const KernelPtr& kernel, const Vec& center,
                                        const std::vector<RegionUnion>& A_list,
                                        const std::vector<Vec>& y_list, const SimConfig& cfg,
                                        std::uint64_t n_paths, int workers = 1);

struct SupportCase {
  Polyline phi;
  double eps;
  SimConfig cfg;
  bool designed_to_fail = false;  // documents a configuration that must yield 0
  std::string label;
};

// Tube positivity: P(sup_{s<=t0} |X_s - phi(s)| < eps) has Wilson lower bound
// > 0 for every positive case; designed-to-fail cases must come out at zero
// (the harness is falsifiable, not vacuous).
VerificationResult verify_support_theorem(const KernelPtr& kernel,
                                          const std::vector<SupportCase>& cases,
                                          std::uint64_t n_paths, int workers = 1);

struct PhiEnvelopeRow {
  double measure_level = 0.0;  // epsilon: Lebesgue-measure floor of the sets
  double level_min = 0.0;      // min occupation estimate over sets and starts
  double level_ci_low = 0.0;
  double envelope = 0.0;       // running minimum over levels >= this one
  double envelope_ci_low = 0.0;
  std::uint64_t n_sets = 0;
};

struct PhiEnvelopeResult {
  std::vector<PhiEnvelopeRow> table;
  VerificationResult result;
};

// Lower envelope phi_hat(eps) of E^x int_0^tau 1_B over random dyadic-cell
// unions B in Q(0,1) with |B| >= eps and starts x in Q(0,1/2). Paths are
// shared across sets per start (common random numbers); occupation decomposes
// exactly over the disjoint cells. The envelope is a suffix minimum over
// levels, nondecreasing by construction.
PhiEnvelopeResult estimate_phi_envelope(const KernelPtr& kernel,
                                        const std::vector<double>& measure_grid,
                                        int random_set_count, const SimConfig& cfg,
                                        std::uint64_t n_paths, int workers = 1);

struct MollifyPipelineParams {
  Vec x0 = zero_vec();
  ScalarField f;
  double lambda = 1.0;
  std::vector<double> eps_list = {0.4, 0.2, 0.1};
  SimConfig resolvent_cfg;
  SimConfig mu_cfg;
  std::uint64_t n_paths = 10000;
  std::uint64_t m_paths = 10000;
  std::vector<Vec> x_grid;  // bound/convergence probe grid (defaulted if empty)
  std::vector<Vec> h_grid;
};

struct MollifyPipelineResult {
  std::vector<ConvergenceRow> resolvent_rows;
  std::vector<KernelErrorRow> kernel_rows;
  VerificationResult result;
};

// Bundles the mollified-kernel diagnostics: exact bound/symmetry inheritance
// on the probe grid (zero tolerance), the resolvent-convergence trend, and
// the sup-grid kernel-convergence trend.
MollifyPipelineResult verify_mollify_pipeline(const KernelPtr& base,
                                              const MollifyPipelineParams& params,
                                              int workers = 1);

// 32-point default probe grids for d = 1 mollify checks.
std::vector<Vec> default_mollify_x_grid(double lo, double hi, int count);
std::vector<Vec> default_mollify_h_grid(int count);

}  // namespace stablelike
