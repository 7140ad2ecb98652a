#pragma once

#include <optional>
#include <vector>

#include "covsim/freeway.hpp"

namespace covsim::temporal {

enum class Scheme { base, rsu, opposite, rsu_and_opposite };

struct RsuConfig {
  double spacing = 400.0;  // d_rsu
  double setback = 2.0;    // distance from the road edge
  double r_rsu = 200.0;
  // Elevated RSUs see over all vehicles; otherwise they sit below vehicle
  // height and are obstructed like any ground sensor.
  bool elevated = false;
};

struct DynamicConfig {
  freeway::FreewayConfig base;
  double speed_s = 20.0;  // both directions, opposite signs
  std::optional<RsuConfig> rsu;
  double r_vehicle = 200.0;
  double r_communication = 500.0;
  double r_interest = 200.0;
  double tau = 2.0;
  Scheme scheme = Scheme::rsu;
  double dt = 0.1;
  double duration = 4.0;
  int object_boundary_samples = 16;

  void validate() const;
};

// Time-stepped two-direction traffic with optional roadside units. Vehicle
// marks are fixed at time zero; every frame displaces the positions, rebuilds
// the blockage snapshot and refreshes the (sensor, object) track table.
// Schemes and tau only filter queries, so one run answers all of them on the
// same realization.
class DynamicSimulation {
 public:
  DynamicSimulation(const DynamicConfig& cfg, Seed seed);

  void step();
  double time() const { return t_; }
  int frame() const { return frame_; }
  int n_vehicles() const { return n_vehicles_; }
  int n_rsus() const { return n_rsus_; }

  Point2 position(std::int32_t entity_id) const;
  bool is_sensing_vehicle(std::int32_t entity_id) const;

  // Sensing vehicles moving in `direction` whose region of interest lies in
  // the guarded stretch of road at the current time.
  std::vector<std::int32_t> reference_ids(int direction) const;

  // Vehicles (other than the reference) whose body overlaps the reference's
  // region of interest at the current time.
  std::vector<std::int32_t> objects_of_interest(std::int32_t ref_id) const;

  // Current-frame geometric test: any boundary sample of the object is inside
  // the sensor's support with a clear line of sight; the sensed object's own
  // body never blocks, nor does the sensor's.
  bool object_sensed(std::int32_t sensor_id, std::int32_t object_id) const;

  // Number of scheme-eligible collaborators within communication range of the
  // reference that sensed the object within [t - tau, t].
  int object_redundancy(std::int32_t ref_id, std::int32_t object_id,
                        Scheme scheme, double tau) const;

  // Fraction of the reference's objects of interest with redundancy >= gamma;
  // nullopt when there are no objects of interest.
  std::optional<double> object_coverage(std::int32_t ref_id, Scheme scheme,
                                        int gamma, double tau) const;

  // Mean over references moving in `direction` (+1 nearby the RSUs, -1
  // opposite, 0 for both).
  std::optional<double> mean_object_coverage(Scheme scheme, int gamma,
                                             double tau, int direction) const;

 private:
  struct Entity {
    Point2 base_pos;
    Vec2 velocity;
    int direction = 0;  // +1 / -1 for traffic, 0 for RSUs
    bool sensor = false;
    bool is_rsu = false;
    bool elevated = false;
    double r_sense = 0.0;
  };

  void rebuild_frame();
  void refresh_tracks();
  bool collaborator_eligible(const Entity& ref, Point2 ref_pos,
                             std::int32_t j, Scheme scheme) const;

  DynamicConfig cfg_;
  std::vector<Entity> entities_;
  int n_vehicles_ = 0;
  int n_rsus_ = 0;
  std::vector<std::int32_t> sensor_entities_;  // sensor slot -> entity id
  std::vector<int> sensor_slot_;               // entity id -> slot or -1
  std::vector<double> last_sensed_;            // slot * n_vehicles + object
  std::vector<Point2> pos_;
  std::vector<Point2> vehicle_local_samples_;
  double object_circumradius_ = 0.0;
  EnvironmentSnapshot env_;
  double t_ = 0.0;
  int frame_ = 0;
};

// RSU sensors along the top road edge: zero-footprint bodies at spacing
// cfg.rsu->spacing, setback cfg.rsu->setback, omni support of radius r_rsu.
// Ids start at 0; the simulation offsets them past the vehicle ids.
std::vector<MarkedObject> place_rsus(const DynamicConfig& cfg);

struct SeriesPoint {
  double t = 0.0;
  std::optional<double> nearby;    // +1 direction, lanes adjacent to the RSUs
  std::optional<double> opposite;  // -1 direction
};

// Runs the configured scheme/tau and reports the per-frame mean
// (gamma,tau)-object coverage per direction, discarding the tau warm-up.
std::vector<SeriesPoint> simulate(const DynamicConfig& cfg, int gamma, Seed seed);

struct TemporalStat {
  double mean = 0.0;
  double se = 0.0;
  int n = 0;
};

// Mean coverage over seeds (series points pooled per seed first).
// direction: +1, -1 or 0 for both.
TemporalStat temporal_coverage_mc(const DynamicConfig& cfg, int gamma,
                                  int direction, int seeds, Seed seed, int jobs);

// Evaluates every (scheme, tau, direction) combination on shared
// realizations: schemes and tau only filter queries, so one simulation per
// seed serves the whole grid. Frames before the largest tau are discarded
// for every combination, keeping them comparable. Results are indexed
// [scheme][tau][direction] with direction 0 -> +1 (nearby), 1 -> -1.
struct TemporalSweep {
  std::vector<Scheme> schemes;
  std::vector<double> taus;
  std::vector<TemporalStat> stats;  // schemes-major, then taus, then direction

  const TemporalStat& at(std::size_t scheme_idx, std::size_t tau_idx,
                         int direction_idx) const {
    return stats[(scheme_idx * taus.size() + tau_idx) * 2 +
                 static_cast<std::size_t>(direction_idx)];
  }
};

TemporalSweep temporal_sweep_mc(const DynamicConfig& cfg,
                                std::vector<Scheme> schemes,
                                std::vector<double> taus, int gamma, int seeds,
                                Seed seed, int jobs);

}  // namespace covsim::temporal
