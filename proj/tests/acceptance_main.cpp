// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one [PASS]/[FAIL] line per criterion. Criterion 10 exercises the
// installed CLI binary (path given via --cli) for byte-identical reruns and
// the validate subcommand.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "covsim/analytics.hpp"
#include "covsim/checks.hpp"
#include "covsim/experiment.hpp"
#include "covsim/freeway.hpp"
#include "covsim/temporal.hpp"

using namespace covsim;

namespace {

struct Criterion {
  int id;
  bool pass;
  std::string details;
  double seconds;
  bool expected_fail = false;  // documented model-vs-threshold gap
};

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

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0,
                double d = 0.0) {
  char buf[200];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c, d);
  return buf;
}

Criterion from_check(int id, const checks::CheckResult& r) {
  return {id, r.pass, r.details, r.seconds, r.known_defect};
}

// Criterion 2: analytic coverage strictly decreasing in density and below
// 0.20 at the high end; simulated freeway curve monotone within 2 SE.
Criterion criterion_fig4_trend(int jobs) {
  Timer timer;
  Criterion c{2, true, "", 0.0};
  const analytics::RoiSpec roi = analytics::RoiDiscStripSpec{100.0, 12.0};

  std::vector<double> analytic_lambdas = {0.001, 0.003, 0.006, 0.01,
                                          0.015, 0.02, 0.025, 0.03};
  double prev = 2.0;
  double analytic_last = 0.0;
  for (double lambda : analytic_lambdas) {
    analytics::DiscModelParams p;
    p.lambda = lambda;
    p.p_s = 0.0;
    analytic_last = analytics::gamma_coverage_approx(p, roi, 1).normalized;
    if (!(analytic_last < prev)) c.pass = false;
    prev = analytic_last;
  }
  if (!(analytic_last < 0.20)) c.pass = false;
  c.details += fmt("analytic end=%.3f; ", analytic_last);

  freeway::FreewayConfig cfg;
  cfg.road_length = 1200.0;
  const std::vector<double> sim_lambdas = {0.003, 0.0075, 0.015, 0.0225};
  const auto sweep = freeway::run_experiment(
      cfg, "target_density", sim_lambdas, freeway::Metric::coverage_area_norm,
      freeway::MetricArgs{}, 30, Seed{1102, 0}, jobs);
  double worst_gap = 0.0;
  for (std::size_t i = 0; i < sweep.records.size(); ++i) {
    const auto& rec = sweep.records[i];
    if (!rec.error.empty()) {
      c.pass = false;
      c.details += "sim point failed; ";
      continue;
    }
    // Analytic overlay tracks the simulated curve within 0.08 absolute.
    analytics::DiscModelParams p;
    p.lambda = sim_lambdas[i];
    p.p_s = 0.0;
    const double analytic = analytics::gamma_coverage_approx(p, roi, 1).normalized;
    worst_gap = std::max(worst_gap, std::abs(analytic - rec.mean));
    if (i + 1 < sweep.records.size()) {
      const auto& next = sweep.records[i + 1];
      const double slack = 2.0 * std::hypot(rec.se, next.se);
      if (!next.error.empty() || !(next.mean <= rec.mean + slack)) {
        c.pass = false;
        c.details += fmt("sim not monotone at %.4f; ", sim_lambdas[i + 1]);
      }
    }
  }
  const auto& last = sweep.records.back();
  c.details += fmt("sim end=%.3f (se %.3f), worst overlay gap=%.3f", last.mean,
                   last.se, worst_gap);
  if (!(last.mean < 0.20)) c.pass = false;
  if (!(worst_gap <= 0.08)) c.pass = false;
  c.seconds = timer.seconds();
  return c;
}

// Criterion 5: freeway 1-coverage 0.20 +/- 0.05 without collaboration and
// >= 0.75 at 20% penetration, at lambda = 0.0175.
Criterion criterion_freeway_headline(int jobs) {
  Timer timer;
  Criterion c{5, true, "", 0.0};
  freeway::FreewayConfig cfg;
  cfg.road_length = 1200.0;
  cfg.target_density = 0.0175;

  const auto solo = freeway::freeway_metric_mc(
      cfg, freeway::Metric::coverage_area_norm, freeway::MetricArgs{}, 40,
      Seed{1105, 0}, jobs);
  c.details += fmt("single=%.3f (se %.3f); ", solo.mean, solo.se);
  if (!(std::abs(solo.mean - 0.20) <= 0.05)) c.pass = false;

  cfg.p_s = 0.2;
  freeway::MetricArgs args;
  args.gamma = 1;
  const auto collab = freeway::freeway_metric_mc(
      cfg, freeway::Metric::gamma_coverage_norm, args, 40, Seed{1105, 1}, jobs);
  c.details += fmt("p_s=0.2 gamma=1: %.3f (se %.3f)", collab.mean, collab.se);
  if (!(collab.mean >= 0.75)) c.pass = false;
  c.seconds = timer.seconds();
  return c;
}

// Criterion 6: RSU gain in 2-coverage above 0.25 at 10% penetration.
Criterion criterion_rsu_gain(int jobs) {
  Timer timer;
  Criterion c{6, true, "", 0.0};
  freeway::FreewayConfig cfg;
  cfg.road_length = 1200.0;
  cfg.target_density = 0.0175;
  cfg.p_s = 0.1;
  freeway::MetricArgs args;
  args.gamma = 2;
  args.gamma_rsu = 1;
  const auto gain = freeway::freeway_metric_mc(
      cfg, freeway::Metric::gamma_coverage_norm, args, 50, Seed{1106, 0}, jobs);
  c.details = fmt("gain=%.3f (se %.3f, n=%.0f)", gain.mean, gain.se,
                  static_cast<double>(gain.n));
  c.pass = gain.mean > 0.25;
  c.seconds = timer.seconds();
  return c;
}

// Criterion 9: temporal monotonicity (exact, per frame), the >95% RSU claim,
// and exact full coverage under elevated road-tiling RSUs.
Criterion criterion_temporal(int jobs) {
  Timer timer;
  Criterion c{9, true, "", 0.0};

  temporal::DynamicConfig cfg;
  cfg.base.road_length = 2400.0;
  cfg.base.target_density = 0.01;
  cfg.base.p_s = 0.1;
  cfg.rsu = temporal::RsuConfig{};
  cfg.tau = 2.0;
  cfg.duration = 4.0;

  // (a) Exact per-frame monotonicity in tau and in the collaborator set.
  {
    temporal::DynamicSimulation sim(cfg, Seed{1109, 0});
    const int n_steps = static_cast<int>(std::llround(cfg.duration / cfg.dt));
    for (int k = 0; k <= n_steps; ++k) {
      if (k > 0) sim.step();
      if (sim.time() + 1e-9 < cfg.tau) continue;
      double prev = -1.0;
      for (double tau : {0.0, 0.5, 1.0, 2.0}) {
        const auto v =
            sim.mean_object_coverage(temporal::Scheme::rsu, 1, tau, 0);
        if (!v) continue;
        if (!(*v >= prev - 1e-12)) {
          c.pass = false;
          c.details += "tau monotonicity violated; ";
        }
        prev = *v;
      }
      const auto base =
          sim.mean_object_coverage(temporal::Scheme::base, 1, 1.0, 0);
      const auto rsu = sim.mean_object_coverage(temporal::Scheme::rsu, 1, 1.0, 0);
      const auto opp =
          sim.mean_object_coverage(temporal::Scheme::opposite, 1, 1.0, 0);
      const auto both = sim.mean_object_coverage(
          temporal::Scheme::rsu_and_opposite, 1, 1.0, 0);
      if (base && rsu && opp && both) {
        if (!(*rsu >= *base - 1e-12 && *opp >= *base - 1e-12 &&
              *both >= std::max(*rsu, *opp) - 1e-12)) {
          c.pass = false;
          c.details += "scheme monotonicity violated; ";
        }
      }
    }
  }

  // (b) RSU collaboration with tau = 2 s exceeds 95% object coverage.
  {
    temporal::DynamicConfig run = cfg;
    run.scheme = temporal::Scheme::rsu;
    const auto stat =
        temporal::temporal_coverage_mc(run, 1, 0, 50, Seed{1109, 1}, jobs);
    c.details += fmt("rsu tau=2 coverage=%.4f (se %.4f, n=%.0f); ", stat.mean,
                     stat.se, static_cast<double>(stat.n));
    if (!(stat.mean > 0.95)) c.pass = false;
  }

  // (c) Elevated RSUs whose supports cover the whole road strip: coverage is
  // exactly 1 for every reported frame.
  {
    temporal::DynamicConfig run = cfg;
    run.rsu->elevated = true;
    run.rsu->r_rsu = 210.0;  // > sqrt(200^2 + 26^2), covers the strip mid-gap
    run.scheme = temporal::Scheme::rsu;
    run.tau = 0.0;
    run.duration = 1.0;
    const auto series = temporal::simulate(run, 1, Seed{1109, 2});
    bool exact = !series.empty();
    for (const auto& pt : series) {
      if (pt.nearby && *pt.nearby != 1.0) exact = false;
      if (pt.opposite && *pt.opposite != 1.0) exact = false;
    }
    if (!exact) {
      c.pass = false;
      c.details += "elevated tiling not exact; ";
    } else {
      c.details += "elevated tiling exact";
    }
  }
  c.seconds = timer.seconds();
  return c;
}

// -------------------------------------------------------- criterion 10

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_cmd(const std::string& cmd) { return std::system(cmd.c_str()); }

Criterion criterion_reproducibility(const std::string& cli, int jobs) {
  Timer timer;
  Criterion c{10, true, "", 0.0};
  const std::string dir = "/tmp/covsim_acceptance";
  run_cmd("rm -rf " + dir + " && mkdir -p " + dir);

  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream f(dir + "/" + name, std::ios::binary);
    f << text;
  };
  write("freeway_small.json",
        R"({"seeds": 2, "resolution": 1.0,
            "freeway": {"road_length": 420, "target_density": 0.008}})");
  write("redundancy_small.json",
        R"({"seeds": 2, "resolution": 1.0, "void_samples": 8,
            "lambdas": [0.004, 0.01],
            "freeway": {"road_length": 420, "target_density": 0.008}})");
  write("gamma_small.json",
        R"({"seeds": 2, "mc_points": 200, "gammas": [1, 2],
            "p_s_values": [0.2, 0.6]})");
  write("v2i_small.json", R"({"trials": 5000, "p_s_values": [0.3, 0.7]})");
  write("temporal_small.json",
        R"({"seeds": 2, "p_s_values": [0.2], "taus": [0.0, 1.0],
            "schemes": ["base", "rsu"],
            "dynamic": {"freeway": {"road_length": 1200,
                                    "target_density": 0.006},
                        "duration": 1.5, "dt": 0.5, "tau": 1.0}})");

  struct Preset {
    std::string name;
    std::string args;
  };
  const std::vector<Preset> presets = {
      {"coverage-area",
       "coverage-area --config " + dir + "/freeway_small.json --seeds 2"},
      {"redundancy", "redundancy --config " + dir + "/redundancy_small.json"},
      {"gamma-coverage-mc",
       "gamma-coverage --model mc --config " + dir + "/gamma_small.json"},
      {"gamma-coverage-freeway",
       "gamma-coverage --model freeway --config " + dir +
           "/freeway_small.json --seeds 2 --resolution 1.0"},
      {"obstruction-sweep", "obstruction-sweep"},
      {"v2i-single", "v2i --mode single --config " + dir + "/v2i_small.json"},
      {"v2i-grid", "v2i --mode grid --config " + dir + "/v2i_small.json"},
      {"v2i-all-lanes",
       "v2i-all-lanes --config " + dir + "/v2i_small.json"},
      {"temporal", "temporal --config " + dir + "/temporal_small.json"},
  };
  for (const auto& p : presets) {
    const std::string out1 = dir + "/" + p.name + "_1.csv";
    const std::string out2 = dir + "/" + p.name + "_2.csv";
    const std::string jobs_arg = " --jobs " + std::to_string(jobs > 0 ? jobs : 2);
    const int rc1 = run_cmd(cli + " " + p.args + " --seed 11 --out " + out1 +
                            jobs_arg + " > /dev/null 2>&1");
    const int rc2 = run_cmd(cli + " " + p.args + " --seed 11 --out " + out2 +
                            jobs_arg + " > /dev/null 2>&1");
    if (rc1 != 0 || rc2 != 0) {
      c.pass = false;
      c.details += p.name + " exited nonzero; ";
      continue;
    }
    const std::string a = slurp(out1), b = slurp(out2);
    if (a.empty() || a != b) {
      c.pass = false;
      c.details += p.name + " not byte-identical; ";
    }
  }
  if (c.pass) c.details += "9 presets byte-identical; ";

  // The validate subcommand must run the oracle suite end to end within the
  // budget. Exit code 1 only signals failed checks (those are judged by their
  // own criteria; one is a documented red), so completion means rc in {0, 1}
  // with all five check lines reported.
  Timer vt;
  const std::string log = dir + "/validate.log";
  const int rc = run_cmd(cli + " validate --out " + dir + "/validate.csv" +
                         " --jobs " + std::to_string(jobs > 0 ? jobs : 2) +
                         " > " + log + " 2>&1");
  const double vsec = vt.seconds();
  const std::string text = slurp(log);
  std::size_t lines = 0;
  for (std::size_t pos = 0; (pos = text.find("] ", pos)) != std::string::npos;
       ++pos) {
    ++lines;
  }
  c.details += fmt("validate rc=%.0f, %.0f checks reported, %.0fs",
                   static_cast<double>(WEXITSTATUS(rc)),
                   static_cast<double>(lines), vsec);
  const int code = WEXITSTATUS(rc);
  if (!((code == 0 || code == 1) && lines >= 5 && vsec <= 1800.0)) {
    c.pass = false;
  }
  c.seconds = timer.seconds();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  int jobs = 0;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string a = argv[i];
    if (a == "--cli") cli = argv[i + 1];
    if (a == "--jobs") jobs = std::atoi(argv[i + 1]);
  }

  std::vector<Criterion> results;
  auto report = [&](const Criterion& c) {
    const char* status = c.pass ? "PASS" : "FAIL";
    std::printf("[%s]%s criterion %d (%.1fs): %s\n", status,
                (!c.pass && c.expected_fail) ? " (expected)" : "", c.id,
                c.seconds, c.details.c_str());
    std::fflush(stdout);
    results.push_back(c);
  };

  report(from_check(1, checks::check_coverage_area_oracle(jobs)));
  report(criterion_fig4_trend(jobs));
  report(from_check(3, checks::check_void_redundancy_oracle(jobs)));
  report(from_check(4, checks::check_gamma_approximation(jobs)));
  report(criterion_freeway_headline(jobs));
  report(criterion_rsu_gain(jobs));
  report(from_check(7, checks::check_single_lane_capacity(jobs)));
  report(from_check(8, checks::check_grid_chain(jobs)));
  report(criterion_temporal(jobs));
  if (!cli.empty()) {
    report(criterion_reproducibility(cli, jobs));
  } else {
    std::printf("[SKIP] criterion 10: no --cli path given\n");
  }

  int passed = 0, expected_fails = 0, hard_fails = 0;
  for (const auto& c : results) {
    if (c.pass) {
      ++passed;
    } else if (c.expected_fail) {
      ++expected_fails;
    } else {
      ++hard_fails;
    }
  }
  std::printf(
      "ACCEPTANCE: %d/%zu criteria passed, %d expected failure(s), %d "
      "unexpected failure(s)\n",
      passed, results.size(), expected_fails, hard_fails);
  return hard_fails == 0 ? 0 : 1;
}
