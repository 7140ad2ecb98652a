#pragma once

#include <optional>
#include <string>
#include <vector>

#include "covsim/pointprocess.hpp"
#include "covsim/sensing.hpp"

namespace covsim::freeway {

// Multi-lane freeway scenario: lanes_per_direction lanes on each side of the
// median, vehicles placed per lane by the hard-core lane process, rectangles
// aligned with the (straight) road. target_density is an area density over
// the road strip, so each lane carries a linear density of
// target_density * lane_width.
struct FreewayConfig {
  int lanes_per_direction = 3;
  double lane_width = 4.0;
  double vehicle_length = 4.8;
  double vehicle_width = 1.8;
  double min_gap = 10.0;
  double lateral_offset_halfwidth = 1.0;
  double road_length = 1500.0;
  double target_density = 0.01;  // vehicles per m^2 of road strip
  double p_s = 0.2;
  double sensing_radius = 100.0;
  double roi_strip_halfwidth = 12.0;
  double guard_length = -1.0;  // < 0: use sensing_radius
  double resolution = 0.25;
  // Cap on reference vehicles evaluated per realization (0 = all). Eligible
  // references are subsampled evenly along the road; realizations dominate
  // the variance, so a handful of references per seed loses little.
  int max_reference_vehicles = 8;

  double road_half_width() const { return lanes_per_direction * lane_width; }
  double guard() const { return guard_length < 0.0 ? sensing_radius : guard_length; }
  double lane_linear_density() const { return target_density * lane_width; }
  void validate() const;
};

struct FreewayRealization {
  EnvironmentSnapshot env;
  std::vector<int> lane_index;  // per object, 0-based from the bottom lane
  std::vector<int> direction;   // +1 for y > 0 lanes, -1 for y < 0 lanes
};

// Vehicles per lane from the hard-core lane process, lateral offsets uniform
// in [-lateral_offset_halfwidth, lateral_offset_halfwidth], sensors chosen by
// independent thinning, sensor at the vehicle center with an omni support.
FreewayRealization generate_freeway(const FreewayConfig& cfg, Seed seed);

enum class Metric { coverage_area_norm, gamma_coverage_norm, void_redundancy };

struct MetricArgs {
  int gamma = 1;
  int gamma_rsu = 0;      // > 0 computes the RSU gamma-coverage gain instead
  int void_samples = 32;  // void locations sampled per realization
};

// Averages the metric over reference vehicles in the two most central lanes
// whose region of interest lies inside the guarded part of the road. For
// coverage metrics the reference is treated as a (conditioned) sensing
// vehicle and the region excludes off-road area; redundancy draws random
// void locations in the central lanes instead. Returns nullopt when no
// reference is eligible.
std::optional<double> central_lane_statistic(const FreewayRealization& real,
                                             const FreewayConfig& cfg,
                                             Metric metric,
                                             const MetricArgs& args, Seed seed);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  int n = 0;
};

// Mean and standard error of the metric over independent realizations.
MeanSe freeway_metric_mc(const FreewayConfig& cfg, Metric metric,
                         const MetricArgs& args, int seeds, Seed seed, int jobs);

struct SweepRecord {
  double coordinate = 0.0;
  std::string metric;
  double mean = 0.0;
  double se = 0.0;
  int n_seeds = 0;
  std::string error;  // non-empty when this grid point failed
};

struct SweepResult {
  std::vector<SweepRecord> records;
  bool any_error = false;
};

// Sweep over one config parameter ("target_density" or "p_s"); per-point
// failures are recorded without aborting the sweep. Deterministic for a
// given root seed.
SweepResult run_experiment(const FreewayConfig& base, const std::string& param,
                           std::span<const double> values, Metric metric,
                           const MetricArgs& args, int seeds, Seed seed,
                           int jobs);

}  // namespace covsim::freeway
