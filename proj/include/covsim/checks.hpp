#pragma once

#include <string>
#include <vector>

namespace covsim::checks {

struct CheckResult {
  std::string name;
  bool pass = false;
  // True when the only failing clause is a documented model-vs-threshold gap
  // (the all-lanes relay floor): the check still reports FAIL, but harnesses
  // may treat the failure as the expected state.
  bool known_defect = false;
  std::string details;
  double seconds = 0.0;
};

// Closed-form expected coverage area vs Monte Carlo of a conditioned sensor,
// within 2% relative at lambda in {0.003, 0.01, 0.0175, 0.03}.
CheckResult check_coverage_area_oracle(int jobs);

// Void-location redundancy: empirical mean within 5% of the closed form at
// lambda = 0.01, p_s = 1; exact linearity of the analytic value in p_s;
// empirical linearity within 2 SE at p_s in {0.25, 0.5, 1}.
CheckResult check_void_redundancy_oracle(int jobs);

// Poisson-tail gamma-coverage approximation vs Monte Carlo of the disc model
// within 0.05 absolute at lambda = 0.01, gamma in {1,2,3}, p_s in {0.1..0.9}.
CheckResult check_gamma_approximation(int jobs);

// Single-lane capacity formulas vs Monte Carlo within 3 SE on the
// (eta, p_s) grid, plus the exact plug-in values.
CheckResult check_single_lane_capacity(int jobs);

// Grid relay chain: row-stochastic matrices, boundary cases, the
// with-assistance uplink bound and the all-lanes p_v2i floor.
CheckResult check_grid_chain(int jobs);

// The oracle-agreement suite behind the `validate` subcommand.
std::vector<CheckResult> run_validation_suite(int jobs);

}  // namespace covsim::checks
