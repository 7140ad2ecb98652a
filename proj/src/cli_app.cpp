#include "covsim/cli_app.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "covsim/checks.hpp"
#include "covsim/config.hpp"
#include "covsim/experiment.hpp"
#include "covsim/montecarlo.hpp"

namespace covsim::cliapp {

namespace {

using config::Common;
using config::ConfigError;
using config::json;
using config::StrictObject;
using experiment::ResultTable;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitBadConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitPartial = 4;

// Command-line overrides; only values given on the command line win over the
// config file.
struct Overrides {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> seeds;
  std::optional<std::int64_t> trials;
  std::optional<int> jobs;
  std::optional<double> resolution;
  std::optional<std::string> out;
};

void add_common_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--seed", o.seed, "root seed");
  cmd->add_option("--seeds", o.seeds, "number of Monte Carlo realizations");
  cmd->add_option("--trials", o.trials, "number of Monte Carlo trials");
  cmd->add_option("--jobs", o.jobs,
                  "worker threads (default: COVSIM_JOBS or hardware)");
  cmd->add_option("--resolution", o.resolution, "raster resolution in meters");
  cmd->add_option("--out", o.out, "output CSV path");
}

json load_config(const Overrides& o) {
  if (!o.config_path) return json::object();
  return config::load_json_file(*o.config_path);
}

Common apply_overrides(Common c, const Overrides& o) {
  if (o.seed) c.seed.root = *o.seed;
  if (o.seeds) c.seeds = *o.seeds;
  if (o.trials) c.trials = *o.trials;
  if (o.jobs) c.jobs = *o.jobs;
  if (o.resolution) c.resolution = *o.resolution;
  if (o.out) c.out = *o.out;
  return c;
}

void write_sidecar(const std::string& command, const Common& common,
                   json specific) {
  specific["command"] = command;
  specific["common"] = common.to_json();
  std::ofstream f(common.out + ".config.json", std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + common.out + ".config.json");
  f << specific.dump(2) << "\n";
}

std::vector<double> get_list(StrictObject& obj, const char* key,
                             std::vector<double> fallback) {
  std::vector<double> v = std::move(fallback);
  obj.get(key, v);
  return v;
}

// ---------------------------------------------------------------- commands

int cmd_coverage_area(const Overrides& ov) {
  const json file = load_config(ov);
  StrictObject top(file, "config");
  Common common = apply_overrides(config::parse_common(top), ov);

  std::vector<double> lambdas = get_list(
      top, "lambdas",
      {0.001, 0.002, 0.004, 0.007, 0.01, 0.014, 0.0175, 0.021, 0.024});
  freeway::FreewayConfig base = config::parse_freeway(top.child("freeway"),
                                                      "config.freeway");
  analytics::DiscModelParams disc =
      config::parse_disc_model(top.child("disc_model"), "config.disc_model");
  const analytics::RoiSpec roi = config::parse_roi(
      top.child("roi"), "config.roi",
      analytics::RoiDiscStripSpec{base.sensing_radius, base.roi_strip_halfwidth});
  top.finish();
  base.resolution = common.resolution;

  const auto sweep = freeway::run_experiment(
      base, "target_density", lambdas, freeway::Metric::coverage_area_norm,
      freeway::MetricArgs{}, common.seeds, common.seed, common.jobs);

  ResultTable table({"lambda", "analytic_norm", "sim_mean", "sim_se", "sim_n",
                     "error"});
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    analytics::DiscModelParams p = disc;
    p.lambda = lambdas[i];
    p.p_s = 0.0;
    const double analytic =
        analytics::gamma_coverage_approx(p, roi, 1).normalized;
    const auto& rec = sweep.records[i];
    // An empty eligible set is signalled by empty cells with n = 0.
    const bool has_data = rec.error.empty() && rec.n_seeds > 0;
    table.add_row({ResultTable::fmt(lambdas[i]), ResultTable::fmt(analytic),
                   has_data ? ResultTable::fmt(rec.mean) : "",
                   has_data ? ResultTable::fmt(rec.se) : "",
                   ResultTable::fmt(rec.n_seeds), rec.error});
  }
  table.write_csv(common.out);
  write_sidecar("coverage-area", common,
                json{{"lambdas", lambdas},
                     {"freeway", config::freeway_to_json(base)},
                     {"disc_model", config::disc_model_to_json(disc)},
                     {"roi", config::roi_to_json(roi)}});
  return sweep.any_error ? kExitPartial : kExitOk;
}

int cmd_redundancy(const Overrides& ov) {
  const json file = load_config(ov);
  StrictObject top(file, "config");
  Common common = apply_overrides(config::parse_common(top), ov);

  std::vector<double> lambdas = get_list(
      top, "lambdas", {0.001, 0.002, 0.004, 0.007, 0.01, 0.014, 0.0175, 0.024});
  freeway::FreewayConfig base;
  base.p_s = 1.0;  // all vehicles collaborate in the redundancy experiment
  base = config::parse_freeway(top.child("freeway"), "config.freeway", base);
  analytics::DiscModelParams disc =
      config::parse_disc_model(top.child("disc_model"), "config.disc_model");
  freeway::MetricArgs args;
  top.get("void_samples", args.void_samples);
  top.finish();
  base.resolution = common.resolution;

  const auto sweep = freeway::run_experiment(
      base, "target_density", lambdas, freeway::Metric::void_redundancy, args,
      common.seeds, common.seed, common.jobs);

  ResultTable table({"lambda", "analytic", "sim_mean", "sim_se", "sim_n",
                     "error"});
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    analytics::DiscModelParams p = disc;
    p.lambda = lambdas[i];
    const auto& rec = sweep.records[i];
    const bool has_data = rec.error.empty() && rec.n_seeds > 0;
    table.add_row({ResultTable::fmt(lambdas[i]),
                   ResultTable::fmt(analytics::expected_void_redundancy(p)),
                   has_data ? ResultTable::fmt(rec.mean) : "",
                   has_data ? ResultTable::fmt(rec.se) : "",
                   ResultTable::fmt(rec.n_seeds), rec.error});
  }
  table.write_csv(common.out);
  write_sidecar("redundancy", common,
                json{{"lambdas", lambdas},
                     {"freeway", config::freeway_to_json(base)},
                     {"disc_model", config::disc_model_to_json(disc)},
                     {"void_samples", args.void_samples}});
  return sweep.any_error ? kExitPartial : kExitOk;
}

int cmd_gamma_coverage(const Overrides& ov, const std::string& model_flag) {
  const json file = load_config(ov);
  StrictObject top(file, "config");
  Common common = apply_overrides(config::parse_common(top), ov);

  std::string model = model_flag.empty() ? "approx" : model_flag;
  top.get("model", model);
  if (!model_flag.empty()) model = model_flag;
  if (model != "approx" && model != "mc" && model != "freeway") {
    throw ConfigError("model: expected approx, mc or freeway");
  }
  std::vector<int> gammas = {1, 2, 3};
  top.get("gammas", gammas);
  std::vector<double> ps =
      get_list(top, "p_s_values",
               {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
  analytics::DiscModelParams disc_base;
  disc_base.lambda = 0.01;
  const analytics::DiscModelParams disc = config::parse_disc_model(
      top.child("disc_model"), "config.disc_model", disc_base);
  const analytics::RoiSpec roi = config::parse_roi(
      top.child("roi"), "config.roi", analytics::RoiDiscSpec{disc.r_sense});
  freeway::FreewayConfig base;
  base.target_density = 0.0175;
  base = config::parse_freeway(top.child("freeway"), "config.freeway", base);
  int mc_points = 1500;
  top.get("mc_points", mc_points);
  freeway::MetricArgs args;
  top.get("gamma_rsu", args.gamma_rsu);
  top.finish();
  base.resolution = common.resolution;

  ResultTable table({"model", "gamma", "p_s", "value", "se", "n_seeds"});
  bool any_error = false;
  if (model == "approx") {
    for (int gamma : gammas) {
      for (double p : ps) {
        analytics::DiscModelParams d = disc;
        d.p_s = p;
        const double v = analytics::gamma_coverage_approx(d, roi, gamma).normalized;
        table.add_row({model, ResultTable::fmt(gamma), ResultTable::fmt(p),
                       ResultTable::fmt(v), ResultTable::fmt(0.0),
                       ResultTable::fmt(0)});
      }
    }
  } else if (model == "mc") {
    const auto grid = montecarlo::gamma_coverage_mc(
        disc, roi, gammas, ps, common.seeds, mc_points, common.seed, common.jobs);
    for (std::size_t gi = 0; gi < grid.gammas.size(); ++gi) {
      for (std::size_t pi = 0; pi < grid.ps.size(); ++pi) {
        const auto& cell = grid.at(gi, pi);
        table.add_row({model, ResultTable::fmt(grid.gammas[gi]),
                       ResultTable::fmt(grid.ps[pi]), ResultTable::fmt(cell.mean),
                       ResultTable::fmt(cell.se), ResultTable::fmt(cell.n)});
      }
    }
  } else {
    for (int gamma : gammas) {
      freeway::MetricArgs a = args;
      a.gamma = gamma;
      for (double p : ps) {
        freeway::FreewayConfig cfg = base;
        cfg.p_s = p;
        try {
          const auto r = freeway::freeway_metric_mc(
              cfg, freeway::Metric::gamma_coverage_norm, a, common.seeds,
              Seed{common.seed.root,
                   common.seed.stream + static_cast<std::uint64_t>(
                                            gamma * 1000 + int(p * 100))},
              common.jobs);
          table.add_row({model, ResultTable::fmt(gamma), ResultTable::fmt(p),
                         r.n > 0 ? ResultTable::fmt(r.mean) : "",
                         r.n > 0 ? ResultTable::fmt(r.se) : "",
                         ResultTable::fmt(r.n)});
        } catch (const std::invalid_argument&) {
          any_error = true;
          table.add_row({model, ResultTable::fmt(gamma), ResultTable::fmt(p),
                         "", "", ""});
        }
      }
    }
  }
  table.write_csv(common.out);
  write_sidecar("gamma-coverage", common,
                json{{"model", model},
                     {"gammas", gammas},
                     {"p_s_values", ps},
                     {"disc_model", config::disc_model_to_json(disc)},
                     {"roi", config::roi_to_json(roi)},
                     {"freeway", config::freeway_to_json(base)},
                     {"mc_points", mc_points},
                     {"gamma_rsu", args.gamma_rsu}});
  return any_error ? kExitPartial : kExitOk;
}

int cmd_obstruction_sweep(const Overrides& ov) {
  const json file = load_config(ov);
  StrictObject top(file, "config");
  Common common = apply_overrides(config::parse_common(top), ov);

  double lambda_s = 0.002;
  top.get("lambda_s", lambda_s);
  std::vector<double> fallback;
  for (int i = 0; i <= 12; ++i) fallback.push_back(lambda_s + i * 0.002);
  std::vector<double> lambda_totals = get_list(top, "lambda_totals", fallback);
  int gamma = 1;
  top.get("gamma", gamma);
  analytics::DiscModelParams disc =
      config::parse_disc_model(top.child("disc_model"), "config.disc_model");
  const analytics::RoiSpec roi = config::parse_roi(
      top.child("roi"), "config.roi", analytics::RoiDiscSpec{disc.r_sense});
  top.finish();

  const auto sweep =
      analytics::coverage_vs_obstruction(disc, lambda_s, lambda_totals, roi, gamma);
  ResultTable table(
      {"obstruction_density", "lambda_total", "p_s", "gamma", "normalized"});
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    table.add_row({ResultTable::fmt(sweep[i].first),
                   ResultTable::fmt(lambda_totals[i]),
                   ResultTable::fmt(lambda_s / lambda_totals[i]),
                   ResultTable::fmt(gamma), ResultTable::fmt(sweep[i].second)});
  }
  table.write_csv(common.out);
  write_sidecar("obstruction-sweep", common,
                json{{"lambda_s", lambda_s},
                     {"lambda_totals", lambda_totals},
                     {"gamma", gamma},
                     {"disc_model", config::disc_model_to_json(disc)},
                     {"roi", config::roi_to_json(roi)}});
  return kExitOk;
}

int cmd_v2i(const Overrides& ov, const std::string& mode_flag, bool all_lanes) {
  const json file = load_config(ov);
  StrictObject top(file, "config");
  Common common = apply_overrides(config::parse_common(top), ov);

  std::string mode = mode_flag.empty() ? "single" : mode_flag;
  if (!all_lanes) {
    top.get("mode", mode);
    if (!mode_flag.empty()) mode = mode_flag;
    if (mode != "single" && mode != "grid") {
      throw ConfigError("mode: expected single or grid");
    }
  }
  std::vector<double> fallback;
  for (int i = 1; i <= 19; ++i) fallback.push_back(0.05 * i);
  std::vector<double> ps = get_list(top, "p_s_values", fallback);
  v2i::LaneParams lane = config::parse_lane(top.child("lane"), "config.lane");
  top.finish();

  ResultTable table =
      all_lanes
          ? ResultTable(
                {"p_s", "p_v2i", "c_ul_norm", "c_dl_bcast_norm", "c_dl_uni_norm"})
          : ResultTable({"p_s", "c_ul_norm", "c_dl_bcast_norm", "c_dl_uni_norm",
                         "c_v2v_norm"});
  for (double p : ps) {
    v2i::LaneParams lp = lane;
    lp.p_s = p;
    if (all_lanes) {
      const auto g = v2i::grid_capacity(lp.eta, p, v2i::SharingMode::all_lanes);
      table.add_row({ResultTable::fmt(p), ResultTable::fmt(g.p_v2i),
                     ResultTable::fmt(g.c_ul_norm),
                     ResultTable::fmt(g.c_dl_broadcast_norm),
                     ResultTable::fmt(g.c_dl_unicast_norm)});
      continue;
    }
    double c_ul = 0.0, c_dl_b = 0.0, c_dl_u = 0.0;
    v2i::LaneMode mc_mode;
    if (mode == "single") {
      const auto r = v2i::single_lane_capacity(lp);
      c_ul = r.c_ul_norm;
      c_dl_b = r.c_dl_broadcast_norm;
      c_dl_u = r.c_dl_unicast_norm;
      mc_mode = v2i::LaneMode::single_lane;
    } else {
      const auto g = v2i::grid_capacity(lp.eta, p, v2i::SharingMode::same_lane);
      c_ul = g.c_ul_norm;
      c_dl_b = g.c_dl_broadcast_norm;
      c_dl_u = g.c_dl_unicast_norm;
      mc_mode = v2i::LaneMode::grid_same_lane;
    }
    const double v2v =
        v2i::v2v_throughput_proxy(lp, mc_mode, common.trials, common.seed);
    table.add_row({ResultTable::fmt(p), ResultTable::fmt(c_ul),
                   ResultTable::fmt(c_dl_b), ResultTable::fmt(c_dl_u),
                   ResultTable::fmt(v2v)});
  }
  table.write_csv(common.out);
  write_sidecar(all_lanes ? "v2i-all-lanes" : "v2i", common,
                json{{"mode", all_lanes ? "all_lanes" : mode},
                     {"p_s_values", ps},
                     {"lane", config::lane_to_json(lane)}});
  return kExitOk;
}

int cmd_temporal(const Overrides& ov) {
  const json file = load_config(ov);
  StrictObject top(file, "config");
  Common common = apply_overrides(config::parse_common(top), ov);

  std::vector<double> ps = get_list(top, "p_s_values", {0.1, 0.4});
  std::vector<double> taus = get_list(top, "taus", {0.0, 2.0});
  std::vector<std::string> scheme_names = {"base", "rsu", "opposite",
                                           "rsu_and_opposite"};
  top.get("schemes", scheme_names);
  int gamma = 1;
  top.get("gamma", gamma);
  temporal::DynamicConfig dyn =
      config::parse_dynamic(top.child("dynamic"), "config.dynamic");
  top.finish();

  std::vector<temporal::Scheme> schemes;
  for (const auto& n : scheme_names) schemes.push_back(config::parse_scheme(n));

  ResultTable table({"p_s", "scheme", "tau", "direction", "coverage_mean",
                     "coverage_se", "n_seeds"});
  for (double p : ps) {
    temporal::DynamicConfig cfg = dyn;
    cfg.base.p_s = p;
    const auto sweep = temporal::temporal_sweep_mc(
        cfg, schemes, taus, gamma, common.seeds,
        Seed{common.seed.root,
             common.seed.stream + static_cast<std::uint64_t>(p * 1000)},
        common.jobs);
    for (std::size_t si = 0; si < schemes.size(); ++si) {
      for (std::size_t ti = 0; ti < taus.size(); ++ti) {
        for (int d = 0; d < 2; ++d) {
          const auto& st = sweep.at(si, ti, d);
          table.add_row({ResultTable::fmt(p), config::scheme_name(schemes[si]),
                         ResultTable::fmt(taus[ti]),
                         d == 0 ? "nearby" : "opposite",
                         ResultTable::fmt(st.mean), ResultTable::fmt(st.se),
                         ResultTable::fmt(st.n)});
        }
      }
    }
  }
  table.write_csv(common.out);
  write_sidecar("temporal", common,
                json{{"p_s_values", ps},
                     {"taus", taus},
                     {"schemes", scheme_names},
                     {"gamma", gamma},
                     {"dynamic", config::dynamic_to_json(dyn)}});
  return kExitOk;
}

int cmd_validate(const Overrides& ov) {
  const json file = load_config(ov);
  StrictObject top(file, "config");
  Common common = apply_overrides(config::parse_common(top), ov);
  top.finish();

  const auto results = checks::run_validation_suite(common.jobs);
  ResultTable table({"check", "pass", "seconds", "details"});
  bool all_pass = true;
  for (const auto& r : results) {
    std::printf("[%s] %s (%.1fs) %s\n", r.pass ? "PASS" : "FAIL",
                r.name.c_str(), r.seconds, r.details.c_str());
    std::fflush(stdout);
    all_pass = all_pass && r.pass;
    table.add_row({r.name, r.pass ? "1" : "0", ResultTable::fmt(r.seconds),
                   r.details});
  }
  table.write_csv(common.out);
  write_sidecar("validate", common, json::object());
  return all_pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{
      "covsim: collaborative line-of-sight sensing coverage and V2X capacity "
      "experiments"};
  app.require_subcommand(1);

  Overrides ov;
  std::string gamma_model;
  std::string v2i_mode;

  auto* cov = app.add_subcommand(
      "coverage-area", "single-sensor coverage vs density: analytic + freeway");
  add_common_options(cov, ov);
  auto* red = app.add_subcommand(
      "redundancy", "void-location sensing redundancy vs density");
  add_common_options(red, ov);
  auto* gam = app.add_subcommand(
      "gamma-coverage", "normalized gamma-coverage vs penetration");
  add_common_options(gam, ov);
  gam->add_option("--model", gamma_model, "approx | mc | freeway");
  auto* obs = app.add_subcommand(
      "obstruction-sweep", "coverage vs obstruction density at fixed sensors");
  add_common_options(obs, ov);
  auto* v2i_cmd = app.add_subcommand(
      "v2i", "V2I capacity requirements vs penetration");
  add_common_options(v2i_cmd, ov);
  v2i_cmd->add_option("--mode", v2i_mode, "single | grid");
  auto* v2i_all = app.add_subcommand(
      "v2i-all-lanes", "V2I capacity when all lanes share data");
  add_common_options(v2i_all, ov);
  auto* temp = app.add_subcommand(
      "temporal", "time-stepped (gamma,tau)-object coverage by scheme");
  add_common_options(temp, ov);
  auto* val = app.add_subcommand("validate", "run the oracle-agreement suite");
  add_common_options(val, ov);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::fprintf(stderr, "{\"error\":\"%s\",\"code\":%d}\n", e.what(),
                 kExitBadConfig);
    return kExitBadConfig;
  }

  try {
    if (cov->parsed()) return cmd_coverage_area(ov);
    if (red->parsed()) return cmd_redundancy(ov);
    if (gam->parsed()) return cmd_gamma_coverage(ov, gamma_model);
    if (obs->parsed()) return cmd_obstruction_sweep(ov);
    if (v2i_cmd->parsed()) return cmd_v2i(ov, v2i_mode, false);
    if (v2i_all->parsed()) return cmd_v2i(ov, "", true);
    if (temp->parsed()) return cmd_temporal(ov);
    if (val->parsed()) return cmd_validate(ov);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "{\"error\":\"%s\",\"code\":%d}\n", e.what(),
                 kExitBadConfig);
    return kExitBadConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "{\"error\":\"%s\",\"code\":%d}\n", e.what(),
                 kExitInfeasible);
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "{\"error\":\"%s\",\"code\":%d}\n", e.what(), 1);
    return 1;
  }
  return kExitBadConfig;
}

}  // namespace covsim::cliapp
