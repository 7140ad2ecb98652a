#include "covsim/checks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "covsim/analytics.hpp"
#include "covsim/experiment.hpp"
#include "covsim/montecarlo.hpp"
#include "covsim/v2i.hpp"

namespace covsim::checks {

namespace {

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

}  // namespace

CheckResult check_coverage_area_oracle(int jobs) {
  Timer timer;
  CheckResult out;
  out.name = "coverage-area oracle (closed form vs Monte Carlo, 2% rel)";
  out.pass = true;
  // One sensor's coverage area fluctuates strongly between realizations
  // (per-seed SD grows from ~20% to ~75% of the mean across this density
  // range), so the seed counts are sized per density to keep the standard
  // error near a third of the 2% tolerance.
  const struct {
    double lambda;
    int seeds;
  } points[] = {{0.003, 1000}, {0.01, 4000}, {0.0175, 7000}, {0.03, 12000}};
  int index = 0;
  for (const auto& pt : points) {
    analytics::DiscModelParams p;
    p.lambda = pt.lambda;
    p.p_s = 1.0;
    const double expected = analytics::expected_coverage_area(p).total;
    const auto mc = montecarlo::coverage_area_mc(
        p, pt.seeds, 0.25, Seed{20240521u + static_cast<std::uint64_t>(index++), 0},
        jobs);
    const double rel = std::abs(mc.mean - expected) / expected;
    out.details += fmt("lambda=%.4g rel_err=%.4f (se %.4f); ", pt.lambda, rel,
                       mc.se / expected);
    if (!(rel <= 0.02)) out.pass = false;
  }
  out.seconds = timer.seconds();
  return out;
}

CheckResult check_void_redundancy_oracle(int jobs) {
  Timer timer;
  CheckResult out;
  out.name = "void-redundancy oracle (5% rel; linear in p_s)";
  out.pass = true;

  analytics::DiscModelParams p;
  p.lambda = 0.01;
  p.p_s = 1.0;
  const double expected = analytics::expected_void_redundancy(p);

  // Analytic linearity to machine precision.
  analytics::DiscModelParams half = p;
  half.p_s = 0.5;
  const double ratio = analytics::expected_void_redundancy(half) / expected;
  if (std::abs(ratio - 0.5) > 1e-15) out.pass = false;
  out.details += fmt("analytic_ratio(0.5)=%.17g; ", ratio);

  const std::vector<double> ps = {0.25, 0.5, 1.0};
  const auto mc =
      montecarlo::void_redundancy_mc(p, ps, 250, 40, Seed{777001, 0}, jobs);
  const double rel = std::abs(mc[2].mean - expected) / expected;
  out.details += fmt("expected=%.3f measured=%.3f rel=%.4f; ", expected,
                     mc[2].mean, rel);
  if (!(rel <= 0.05)) out.pass = false;

  // Empirical linearity: mean at p_s should match p_s * mean at 1 within 2 SE.
  for (std::size_t i = 0; i + 1 < ps.size(); ++i) {
    const double predicted = ps[i] * mc[2].mean;
    const double se = 2.0 * std::sqrt(mc[i].se * mc[i].se +
                                      ps[i] * ps[i] * mc[2].se * mc[2].se);
    const double diff = std::abs(mc[i].mean - predicted);
    out.details += fmt("p=%.2f diff=%.3f 2se=%.3f; ", ps[i], diff, se);
    if (!(diff <= se)) out.pass = false;
  }
  out.seconds = timer.seconds();
  return out;
}

CheckResult check_gamma_approximation(int jobs) {
  Timer timer;
  CheckResult out;
  out.name = "gamma-coverage approximation vs disc-model MC (0.05 abs)";
  out.pass = true;

  analytics::DiscModelParams p;
  p.lambda = 0.01;
  const analytics::RoiSpec roi = analytics::RoiDiscSpec{100.0};
  std::vector<int> gammas = {1, 2, 3};
  std::vector<double> ps;
  for (int i = 1; i <= 9; ++i) ps.push_back(0.1 * i);

  const auto grid = montecarlo::gamma_coverage_mc(p, roi, gammas, ps, 100, 1500,
                                                  Seed{424242, 0}, jobs);
  double worst = 0.0;
  int worst_gamma = 0;
  double worst_p = 0.0;
  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
      analytics::DiscModelParams pp = p;
      pp.p_s = ps[pi];
      const double approx =
          analytics::gamma_coverage_approx(pp, roi, gammas[gi]).normalized;
      const double diff = std::abs(approx - grid.at(gi, pi).mean);
      if (diff > worst) {
        worst = diff;
        worst_gamma = gammas[gi];
        worst_p = ps[pi];
      }
      if (!(diff <= 0.05)) out.pass = false;
    }
  }
  out.details = fmt("worst |approx-mc|=%.4f at gamma=%.0f p_s=%.1f", worst,
                    static_cast<double>(worst_gamma), worst_p);
  out.seconds = timer.seconds();
  return out;
}

CheckResult check_single_lane_capacity(int jobs) {
  Timer timer;
  CheckResult out;
  out.name = "single-lane capacity (formula vs MC, 3 SE; plug-in values)";
  out.pass = true;

  // Exact plug-in values.
  {
    v2i::LaneParams p;
    p.eta = 5;
    p.p_s = 0.5;
    const auto r = v2i::single_lane_capacity(p);
    if (std::abs(r.e_n_uplink - 0.964844) > 5e-7) out.pass = false;
    if (std::abs(r.e_n_dl_unicast - 2.0) > 1e-12) out.pass = false;
    out.details += fmt("E[N_up](5,0.5)=%.6f; ", r.e_n_uplink);
    for (double ps : {0.0, 1.0}) {
      v2i::LaneParams q;
      q.eta = 5;
      q.p_s = ps;
      if (v2i::single_lane_capacity(q).e_n_uplink != 0.0) out.pass = false;
    }
  }

  const int etas[] = {1, 2, 5, 10};
  struct Point {
    int eta;
    double p_s;
  };
  std::vector<Point> grid;
  for (int eta : etas) {
    for (int i = 1; i <= 9; ++i) grid.push_back({eta, 0.1 * i});
  }
  std::vector<std::string> failures(grid.size());
  double worst_sigma = 0.0;
  std::vector<double> sigmas(grid.size(), 0.0);
  experiment::parallel_for(static_cast<std::int64_t>(grid.size()), jobs,
                           [&](std::int64_t i) {
    const auto& g = grid[static_cast<std::size_t>(i)];
    v2i::LaneParams p;
    p.eta = g.eta;
    p.p_s = g.p_s;
    p.t_interest = g.eta * p.t_gap;  // keep eta = floor(t_interest / t_gap)
    const auto exact = v2i::single_lane_capacity(p);
    const auto mc = v2i::monte_carlo_lane(
        p, v2i::LaneMode::single_lane, 1000000,
        Seed{31337, static_cast<std::uint64_t>(i)});
    const double s_up =
        mc.se_n_uplink > 0.0
            ? std::abs(mc.e_n_uplink - exact.e_n_uplink) / mc.se_n_uplink
            : (mc.e_n_uplink == exact.e_n_uplink ? 0.0 : 1e9);
    const double s_dl = mc.se_n_dl_unicast > 0.0
                            ? std::abs(mc.e_n_dl_unicast - exact.e_n_dl_unicast) /
                                  mc.se_n_dl_unicast
                            : (mc.e_n_dl_unicast == exact.e_n_dl_unicast ? 0.0 : 1e9);
    sigmas[static_cast<std::size_t>(i)] = std::max(s_up, s_dl);
    if (s_up > 3.0 || s_dl > 3.0) {
      failures[static_cast<std::size_t>(i)] =
          fmt("eta=%.0f p=%.1f sigma=%.2f; ", g.eta, g.p_s, std::max(s_up, s_dl));
    }
  });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    worst_sigma = std::max(worst_sigma, sigmas[i]);
    if (!failures[i].empty()) {
      out.pass = false;
      out.details += failures[i];
    }
  }
  out.details += fmt("worst |mc-exact|=%.2f sigma", worst_sigma);
  out.seconds = timer.seconds();
  return out;
}

CheckResult check_grid_chain(int jobs) {
  (void)jobs;
  Timer timer;
  CheckResult out;
  out.name = "grid relay chain (stochasticity, bounds)";
  bool core_ok = true;

  for (int i = 1; i <= 9; ++i) {
    const double p_s = 0.1 * i;
    for (auto mode : {v2i::SharingMode::same_lane, v2i::SharingMode::all_lanes}) {
      const auto tm = v2i::build_transition_matrix(p_s, mode);
      if (tm.max_row_error() > 1e-12) {
        core_ok = false;
        out.details += fmt("row error %.2e at p=%.1f; ", tm.max_row_error(), p_s);
      }
    }
  }

  if (v2i::grid_capacity(5, 1.0, v2i::SharingMode::same_lane).p_v2i != 0.0) {
    core_ok = false;
    out.details += "p_v2i(p_s=1) != 0; ";
  }

  double worst_ul = 0.0;
  for (double p_s : {0.81, 0.85, 0.9, 0.95}) {
    const auto g = v2i::grid_capacity(5, p_s, v2i::SharingMode::same_lane);
    worst_ul = std::max(worst_ul, g.c_ul_norm);
    if (!(g.c_ul_norm < 0.25)) core_ok = false;
  }
  out.details += fmt("max c_ul_norm(p_s>0.8)=%.4f; ", worst_ul);

  // All-lanes floor clause, stated as written. The exact chain value at
  // eta = 5 is 0.9400 at the interval ends (cross-validated by a direct
  // Monte Carlo of the relay rules), so this clause is expected to fail;
  // when it is the only failure the result is flagged as the known gap.
  bool floor_ok = true;
  double min_pv2i = 1.0;
  for (int i = 0; i <= 10; ++i) {
    const double p_s = 0.1 + 0.05 * i;
    const auto g = v2i::grid_capacity(5, p_s, v2i::SharingMode::all_lanes);
    min_pv2i = std::min(min_pv2i, g.p_v2i);
    if (!(g.p_v2i > 0.95)) floor_ok = false;
  }
  out.details += fmt("min all-lanes p_v2i on [0.1,0.6]=%.4f (floor 0.95)", min_pv2i);

  out.pass = core_ok && floor_ok;
  out.known_defect = core_ok && !floor_ok;
  out.seconds = timer.seconds();
  return out;
}

std::vector<CheckResult> run_validation_suite(int jobs) {
  std::vector<CheckResult> results;
  results.push_back(check_coverage_area_oracle(jobs));
  results.push_back(check_void_redundancy_oracle(jobs));
  results.push_back(check_gamma_approximation(jobs));
  results.push_back(check_single_lane_capacity(jobs));
  results.push_back(check_grid_chain(jobs));
  return results;
}

}  // namespace covsim::checks
