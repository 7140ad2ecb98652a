#include "covsim/freeway.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "covsim/experiment.hpp"

namespace covsim::freeway {

namespace {

// Fixed substream layout so per-lane realizations are independent of each
// other and of the mark draws.
constexpr std::uint64_t kLanePositions = 100;
constexpr std::uint64_t kLaneOffsets = 200;
constexpr std::uint64_t kLaneThinning = 300;
constexpr std::uint64_t kVoidSampling = 400;

}  // namespace

void FreewayConfig::validate() const {
  if (lanes_per_direction < 1) {
    throw std::invalid_argument("FreewayConfig: need at least one lane per direction");
  }
  if (lane_width <= 0.0 || vehicle_length <= 0.0 || vehicle_width <= 0.0 ||
      road_length <= 0.0 || min_gap <= 0.0) {
    throw std::invalid_argument("FreewayConfig: non-positive geometry");
  }
  if (p_s < 0.0 || p_s > 1.0) {
    throw std::invalid_argument("FreewayConfig: p_s outside [0,1]");
  }
  if (target_density < 0.0) {
    throw std::invalid_argument("FreewayConfig: negative density");
  }
  if (lane_linear_density() >= 1.0 / min_gap) {
    throw std::invalid_argument(
        "FreewayConfig: per-lane density " + std::to_string(lane_linear_density()) +
        " is infeasible; the hard-core bound 1/min_gap is " +
        std::to_string(1.0 / min_gap));
  }
  if (lateral_offset_halfwidth < 0.0 ||
      lateral_offset_halfwidth > 0.5 * (lane_width - vehicle_width)) {
    throw std::invalid_argument(
        "FreewayConfig: lateral offsets would push vehicles out of their lane");
  }
}

FreewayRealization generate_freeway(const FreewayConfig& cfg, Seed seed) {
  cfg.validate();
  const int n_lanes = 2 * cfg.lanes_per_direction;
  const double half_w = cfg.road_half_width();

  std::vector<MarkedObject> objects;
  std::vector<int> lane_index;
  std::vector<int> direction;
  std::int32_t next_id = 0;

  const geometry::ConvexShape body =
      geometry::Rect{0.5 * cfg.vehicle_length, 0.5 * cfg.vehicle_width, 0.0};
  const RadialSupport support = geometry::OmniSupport{cfg.sensing_radius};

  for (int lane = 0; lane < n_lanes; ++lane) {
    // Lanes from the bottom: lane centers at -half_w + (lane + 0.5) * width.
    const double lane_y = -half_w + (lane + 0.5) * cfg.lane_width;
    const int dir = lane_y > 0.0 ? +1 : -1;
    // Lanes vary the root (hashed) rather than the stream: callers advance
    // streams linearly across seeds, and linear offsets in the same dimension
    // would alias lane realizations between adjacent seeds.
    const Seed lane_seed{seed.root ^ mix64(kLanePositions + lane), seed.stream};
    const auto positions = pointprocess::sample_matern_lane(
        cfg.road_length, cfg.min_gap, cfg.lane_linear_density(), lane_seed);
    Rng offset_rng = make_rng(seed, kLaneOffsets + lane);
    Rng thin_rng = make_rng(seed, kLaneThinning + lane);
    for (double x : positions) {
      const double off = offset_rng.uniform(-cfg.lateral_offset_halfwidth,
                                            cfg.lateral_offset_halfwidth);
      MarkedObject o;
      o.id = next_id++;
      o.placed = PlacedShape{Point2{x, lane_y + off}, body};
      if (thin_rng.bernoulli(cfg.p_s)) {
        o.sensor = SensorMark{Point2{0.0, 0.0}, support};
      }
      objects.push_back(std::move(o));
      lane_index.push_back(lane);
      direction.push_back(dir);
    }
  }

  Window w;
  w.x_min = 0.0;
  w.x_max = cfg.road_length;
  w.y_min = -half_w;
  w.y_max = half_w;
  w.guard_margin = 0.0;  // guards are handled along the road axis only

  FreewayRealization real{EnvironmentSnapshot(std::move(objects), w),
                          std::move(lane_index), std::move(direction)};
  return real;
}

namespace {

// Reference vehicles: in one of the two most central lanes, with the whole
// region of interest inside the guarded stretch of road.
std::vector<std::size_t> eligible_references(const FreewayRealization& real,
                                             const FreewayConfig& cfg) {
  const int lane_lo = cfg.lanes_per_direction - 1;
  const int lane_hi = cfg.lanes_per_direction;
  const double x_lo = cfg.guard() + cfg.sensing_radius;
  const double x_hi = cfg.road_length - cfg.guard() - cfg.sensing_radius;
  std::vector<std::size_t> refs;
  const auto& objs = real.env.objects();
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const int lane = real.lane_index[i];
    if (lane != lane_lo && lane != lane_hi) continue;
    const double x = objs[i].placed.center.x;
    if (x < x_lo || x > x_hi) continue;
    refs.push_back(i);
  }
  return refs;
}

double reference_statistic(const FreewayRealization& real,
                           const FreewayConfig& cfg, std::size_t ref_idx,
                           Metric metric, const MetricArgs& args) {
  const MarkedObject& ref = real.env.objects()[ref_idx];

  // The reference is evaluated as a conditioned sensing vehicle. Marking it
  // does not change any body, so the patched snapshot has identical blocking
  // geometry.
  const EnvironmentSnapshot* env = &real.env;
  EnvironmentSnapshot patched;
  if (!ref.is_sensor()) {
    auto objs = real.env.objects();
    objs[ref_idx].sensor =
        SensorMark{Point2{0.0, 0.0}, geometry::OmniSupport{cfg.sensing_radius}};
    patched = EnvironmentSnapshot(std::move(objs), real.env.window());
    env = &patched;
  }

  const sensing::RegionOfInterest roi = sensing::RoiDiscStrip{
      ref.placed.center, cfg.sensing_radius, cfg.roi_strip_halfwidth};
  const sensing::GridOptions opts{
      std::pair<double, double>{-cfg.road_half_width(), cfg.road_half_width()}};

  if (metric == Metric::coverage_area_norm) {
    const std::int32_t ids[1] = {ref.id};
    return sensing::gamma_coverage(*env, ids, roi, 1, cfg.resolution, opts)
        .normalized;
  }

  // gamma coverage / RSU gain over all sensors plus the conditioned reference.
  const std::vector<std::int32_t> collaborators = env->sensor_ids();
  if (args.gamma_rsu > 0) {
    return sensing::rsu_gamma_gain(*env, collaborators, roi, args.gamma,
                                   args.gamma_rsu, cfg.resolution, opts);
  }
  return sensing::gamma_coverage(*env, collaborators, roi, args.gamma,
                                 cfg.resolution, opts)
      .normalized;
}

// Expected redundancy of random void locations in the two central lanes.
std::optional<double> void_redundancy_statistic(const FreewayRealization& real,
                                                const FreewayConfig& cfg,
                                                const MetricArgs& args,
                                                Seed seed) {
  const double x_lo = cfg.guard() + cfg.sensing_radius;
  const double x_hi = cfg.road_length - cfg.guard() - cfg.sensing_radius;
  if (x_hi <= x_lo) return std::nullopt;
  const auto sensors = real.env.sensor_ids();
  Rng rng = make_rng(seed, kVoidSampling);
  double sum = 0.0;
  int n = 0;
  int attempts = 0;
  const int wanted = args.void_samples;
  while (n < wanted && attempts < wanted * 50) {
    ++attempts;
    const double x = rng.uniform(x_lo, x_hi);
    const double y = rng.uniform(-cfg.lane_width, cfg.lane_width);
    const Point2 p{x, y};
    bool occupied = false;
    real.env.for_each_near(p, 0.0, [&](std::int32_t idx) {
      if (!occupied &&
          geometry::point_in_shape(p, real.env.objects()[idx].placed)) {
        occupied = true;
      }
    });
    if (occupied) continue;
    sum += sensing::redundancy_at(real.env, sensors, p);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

}  // namespace

std::optional<double> central_lane_statistic(const FreewayRealization& real,
                                             const FreewayConfig& cfg,
                                             Metric metric,
                                             const MetricArgs& args, Seed seed) {
  if (metric == Metric::void_redundancy) {
    return void_redundancy_statistic(real, cfg, args, seed);
  }
  std::vector<std::size_t> refs = eligible_references(real, cfg);
  if (refs.empty()) return std::nullopt;
  if (cfg.max_reference_vehicles > 0 &&
      refs.size() > static_cast<std::size_t>(cfg.max_reference_vehicles)) {
    std::vector<std::size_t> picked;
    const std::size_t n = static_cast<std::size_t>(cfg.max_reference_vehicles);
    for (std::size_t k = 0; k < n; ++k) {
      picked.push_back(refs[k * refs.size() / n]);
    }
    refs = std::move(picked);
  }
  double sum = 0.0;
  for (std::size_t idx : refs) {
    sum += reference_statistic(real, cfg, idx, metric, args);
  }
  return sum / static_cast<double>(refs.size());
}

MeanSe freeway_metric_mc(const FreewayConfig& cfg, Metric metric,
                         const MetricArgs& args, int seeds, Seed seed, int jobs) {
  cfg.validate();
  std::vector<std::optional<double>> values(static_cast<std::size_t>(seeds));
  experiment::parallel_for(seeds, jobs, [&](std::int64_t i) {
    const Seed trial_seed{seed.root, seed.stream + 1000 + static_cast<std::uint64_t>(i)};
    const auto real = generate_freeway(cfg, trial_seed);
    values[static_cast<std::size_t>(i)] =
        central_lane_statistic(real, cfg, metric, args, trial_seed);
  });
  experiment::Accumulator acc;
  for (const auto& v : values) {
    if (v) acc.add(*v);
  }
  return {acc.mean(), acc.se(), static_cast<int>(acc.n)};
}

SweepResult run_experiment(const FreewayConfig& base, const std::string& param,
                           std::span<const double> values, Metric metric,
                           const MetricArgs& args, int seeds, Seed seed,
                           int jobs) {
  if (values.empty()) throw std::invalid_argument("run_experiment: empty grid");
  SweepResult out;
  const char* metric_name = metric == Metric::coverage_area_norm
                                ? "coverage_area_norm"
                                : metric == Metric::gamma_coverage_norm
                                      ? "gamma_coverage_norm"
                                      : "void_redundancy";
  for (std::size_t p = 0; p < values.size(); ++p) {
    SweepRecord rec;
    rec.coordinate = values[p];
    rec.metric = metric_name;
    FreewayConfig cfg = base;
    if (param == "target_density") {
      cfg.target_density = values[p];
    } else if (param == "p_s") {
      cfg.p_s = values[p];
    } else {
      throw std::invalid_argument("run_experiment: unknown sweep parameter " + param);
    }
    try {
      const Seed point_seed{seed.root, seed.stream + (p + 1) * 1000000ULL};
      const MeanSe r = freeway_metric_mc(cfg, metric, args, seeds, point_seed, jobs);
      rec.mean = r.mean;
      rec.se = r.se;
      rec.n_seeds = r.n;
    } catch (const std::exception& e) {
      rec.error = e.what();
      out.any_error = true;
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace covsim::freeway
