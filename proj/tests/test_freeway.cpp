#include <stdexcept>
#include <cmath>
#include <set>

#include "covsim/freeway.hpp"
#include "doctest.h"

using namespace covsim;
using namespace covsim::freeway;

namespace {

FreewayConfig small_config() {
  FreewayConfig cfg;
  cfg.road_length = 800.0;
  cfg.target_density = 0.01;
  cfg.p_s = 0.2;
  return cfg;
}

}  // namespace

TEST_SUITE("freeway") {

TEST_CASE("empty road at zero density") {
  FreewayConfig cfg = small_config();
  cfg.target_density = 0.0;
  const auto real = generate_freeway(cfg, Seed{1, 0});
  CHECK(real.env.size() == 0);
}

TEST_CASE("infeasible density is rejected with the hard-core bound") {
  FreewayConfig cfg = small_config();
  cfg.target_density = 0.026;  // 0.104 per meter per lane > 1/min_gap
  CHECK_THROWS_AS((void)generate_freeway(cfg, Seed{1, 0}), std::invalid_argument);
}

TEST_CASE("realization respects lanes, gaps and offsets") {
  FreewayConfig cfg = small_config();
  cfg.target_density = 0.0175;
  for (int s = 0; s < 20; ++s) {
    const auto real = generate_freeway(cfg, Seed{33, static_cast<uint64_t>(s)});
    REQUIRE(real.env.size() > 0);
    // Same-lane center gaps stay above min_gap.
    std::vector<std::vector<double>> by_lane(6);
    for (std::size_t i = 0; i < real.env.size(); ++i) {
      const auto& o = real.env.objects()[i];
      by_lane[static_cast<std::size_t>(real.lane_index[i])].push_back(
          o.placed.center.x);
      // Vehicles stay within their lane: |offset| <= 1 < (4 - 1.8) / 2.
      const double lane_center =
          -cfg.road_half_width() + (real.lane_index[i] + 0.5) * cfg.lane_width;
      CHECK(std::abs(o.placed.center.y - lane_center) <=
            cfg.lateral_offset_halfwidth + 1e-12);
      CHECK(real.direction[i] == (o.placed.center.y > 0 ? 1 : -1));
    }
    for (const auto& lane : by_lane) {
      for (std::size_t i = 0; i + 1 < lane.size(); ++i) {
        CHECK(lane[i + 1] - lane[i] >= cfg.min_gap);
      }
    }
  }
}

TEST_CASE("no same-lane rectangle overlap is possible") {
  // min_gap 10 > vehicle_length 4.8, and lane offsets keep bodies inside
  // their own lane, so overlap would need |offset| > (lane_width - width)/2.
  FreewayConfig cfg = small_config();
  CHECK(cfg.lateral_offset_halfwidth <= 0.5 * (cfg.lane_width - cfg.vehicle_width));
  cfg.lateral_offset_halfwidth = 1.2;  // > (4 - 1.8) / 2 = 1.1
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("per-lane density bookkeeping over seeds") {
  FreewayConfig cfg = small_config();
  cfg.road_length = 4000.0;
  cfg.target_density = 0.0175;
  double total = 0.0;
  const int n_seeds = 60;
  for (int s = 0; s < n_seeds; ++s) {
    total += static_cast<double>(
        generate_freeway(cfg, Seed{44, static_cast<uint64_t>(s)}).env.size());
  }
  const double per_lane_km =
      total / n_seeds / 6.0 / cfg.road_length;
  CHECK(std::abs(per_lane_km - cfg.lane_linear_density()) <=
        0.05 * cfg.lane_linear_density());
}

TEST_CASE("single-vehicle road: statistic equals the direct metric") {
  FreewayConfig cfg = small_config();
  cfg.road_length = 420.0;
  cfg.guard_length = 100.0;
  // One vehicle in a central lane, region of interest inside the guard.
  MarkedObject car;
  car.id = 0;
  car.placed = {geometry::Point2{210.0, 2.0},
                geometry::Rect{2.4, 0.9, 0.0}};
  Window w{0.0, cfg.road_length, -12.0, 12.0};
  FreewayRealization real{EnvironmentSnapshot({car}, w), {3}, {+1}};
  const auto stat = central_lane_statistic(real, cfg,
                                           Metric::coverage_area_norm,
                                           MetricArgs{}, Seed{55, 0});
  REQUIRE(stat.has_value());
  // Nothing blocks, so coverage fills the clipped region of interest.
  CHECK(*stat == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("empty eligible set signals no value") {
  FreewayConfig cfg = small_config();
  cfg.road_length = 150.0;  // shorter than twice the guard margin
  cfg.target_density = 0.005;
  const auto real = generate_freeway(cfg, Seed{66, 0});
  const auto stat = central_lane_statistic(real, cfg, Metric::coverage_area_norm,
                                           MetricArgs{}, Seed{66, 0});
  CHECK_FALSE(stat.has_value());
}

TEST_CASE("normalized metrics stay within [0, 1]") {
  FreewayConfig cfg = small_config();
  cfg.road_length = 600.0;
  for (int s = 0; s < 3; ++s) {
    const auto real = generate_freeway(cfg, Seed{77, static_cast<uint64_t>(s)});
    const auto cov = central_lane_statistic(real, cfg, Metric::coverage_area_norm,
                                            MetricArgs{}, Seed{77, 9});
    if (cov) {
      CHECK(*cov >= 0.0);
      CHECK(*cov <= 1.0);
    }
    MetricArgs args;
    args.gamma = 1;
    const auto g1 = central_lane_statistic(real, cfg, Metric::gamma_coverage_norm,
                                           args, Seed{77, 9});
    if (g1) {
      CHECK(*g1 >= 0.0);
      CHECK(*g1 <= 1.0);
    }
  }
}

TEST_CASE("sweep harness: single point equals a direct call, deterministic") {
  FreewayConfig cfg = small_config();
  cfg.road_length = 600.0;
  const std::vector<double> pts = {0.01};
  const auto sweep1 = run_experiment(cfg, "target_density", pts,
                                     Metric::coverage_area_norm, MetricArgs{}, 3,
                                     Seed{88, 0}, 0);
  const auto sweep2 = run_experiment(cfg, "target_density", pts,
                                     Metric::coverage_area_norm, MetricArgs{}, 3,
                                     Seed{88, 0}, 1);
  REQUIRE(sweep1.records.size() == 1);
  CHECK_FALSE(sweep1.any_error);
  CHECK(sweep1.records[0].mean == sweep2.records[0].mean);
  CHECK(sweep1.records[0].se == sweep2.records[0].se);

  FreewayConfig direct = cfg;
  direct.target_density = 0.01;
  const auto mc = freeway_metric_mc(direct, Metric::coverage_area_norm,
                                    MetricArgs{}, 3,
                                    Seed{88, 0 + 1 * 1000000ULL}, 0);
  CHECK(sweep1.records[0].mean == doctest::Approx(mc.mean).epsilon(1e-15));
}

TEST_CASE("sweep harness records per-point failures without aborting") {
  FreewayConfig cfg = small_config();
  cfg.road_length = 600.0;
  const std::vector<double> pts = {0.01, 0.05};  // second point infeasible
  const auto sweep = run_experiment(cfg, "target_density", pts,
                                    Metric::coverage_area_norm, MetricArgs{}, 2,
                                    Seed{99, 0}, 0);
  REQUIRE(sweep.records.size() == 2);
  CHECK(sweep.any_error);
  CHECK(sweep.records[0].error.empty());
  CHECK_FALSE(sweep.records[1].error.empty());
}

TEST_CASE("coverage declines with density (trend over a small sweep)") {
  FreewayConfig cfg = small_config();
  cfg.road_length = 700.0;
  const std::vector<double> pts = {0.004, 0.02};
  const auto sweep = run_experiment(cfg, "target_density", pts,
                                    Metric::coverage_area_norm, MetricArgs{}, 6,
                                    Seed{111, 0}, 0);
  REQUIRE(sweep.records.size() == 2);
  const auto& lo = sweep.records[0];
  const auto& hi = sweep.records[1];
  CHECK(lo.mean - hi.mean > -2.0 * std::hypot(lo.se, hi.se));
  CHECK(lo.mean > hi.mean);
}

}  // TEST_SUITE
