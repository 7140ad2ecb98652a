#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "covsim/rng.hpp"

namespace covsim::v2i {

// Single-lane sharing model: vehicles at the minimum safe gap t_gap seconds,
// each sensing vehicle shares data with eta = floor(t_interest / t_gap)
// vehicles in front and behind. nu is the data rate of one vehicle's message
// stream; capacities are also reported normalized by lambda_vehicle * d * nu.
struct LaneParams {
  int eta = 5;
  double p_s = 0.5;
  double speed_s = 20.0;     // m/s
  double t_gap = 0.5;        // s
  double t_interest = 2.5;   // s
  double segment_d = 1000.0; // m of road served by one infrastructure node
  double nu = 1.0;

  double lambda_vehicle() const { return 1.0 / (speed_s * t_gap); }
  void validate() const;  // eta must equal floor(t_interest / t_gap)
};

struct CapacityResult {
  double e_n_uplink = 0.0;
  double e_n_dl_unicast = 0.0;
  double c_ul = 0.0;
  double c_dl_broadcast = 0.0;
  double c_dl_unicast = 0.0;
  double c_ul_norm = 0.0;
  double c_dl_broadcast_norm = 0.0;
  double c_dl_unicast_norm = 0.0;
};

// Probability that V2V relaying fails in one direction: the sensing vehicles
// among the eta ahead form a reachable prefix with probability
// sum_{k=0..eta} p_s^k (1-p_s)^{eta-k}.
double p_front(int eta, double p_s);
// Probability that the infrastructure is needed at all; the two directions
// are independent, and E[N_uplink] = p_v2i.
double p_v2i(int eta, double p_s);

CapacityResult single_lane_capacity(const LaneParams& p);

// Three-lane grid relay chain. State Z_k = (X_k, Y_k): bit i of x says the
// lane-(i+1) vehicle in column k is collaborating and holds the data; y says
// whether a V2I downlink was needed within the first k columns.
enum class SharingMode {
  same_lane,  // only center-lane vehicles need the data; side lanes relay
  all_lanes,  // vehicles in all three lanes need the data
};

struct TransitionMatrix {
  static constexpr int kStates = 16;  // x in [0,8) | y<<3
  std::array<std::array<double, kStates>, kStates> p{};

  static int state(int x, int y) { return x | (y << 3); }
  static int x_of(int s) { return s & 7; }
  static int y_of(int s) { return s >> 3; }
  double max_row_error() const;  // max |row sum - 1|
};

// Row-stochastic transition matrix, enumerating the 8 equally structured
// outcomes of the next column's collaboration bits.
TransitionMatrix build_transition_matrix(double p_s, SharingMode mode);

struct GridCapacity {
  double p_v2i = 0.0;
  double e_n_uplink = 0.0;      // equals p_v2i
  double e_n_dl_unicast = 0.0;  // both directions
  double c_ul_norm = 0.0;
  double c_dl_broadcast_norm = 0.0;
  double c_dl_unicast_norm = 0.0;
};

// Chain analysis: pi_0 conditions the reference (center-lane) vehicle on
// being a sensing vehicle with lateral neighbors independently Bernoulli(p_s);
// pi_k = pi_{k-1} P; forward/backward tails are combined per initial state.
GridCapacity grid_capacity(int eta, double p_s, SharingMode mode);

enum class LaneMode { single_lane, grid_same_lane, grid_all_lanes };

struct LaneMcResult {
  double e_n_uplink = 0.0;
  double se_n_uplink = 0.0;
  double e_n_dl_unicast = 0.0;
  double se_n_dl_unicast = 0.0;
  double c_ul_norm = 0.0;
  double c_dl_broadcast_norm = 0.0;
  double c_dl_unicast_norm = 0.0;
  // 95th percentile of the total uplink count over a road segment of length
  // segment_d (burst proxy), and its mean.
  double segment_uplink_p95 = 0.0;
  double segment_uplink_mean = 0.0;
  // V2V relay transmissions per sensing vehicle (throughput proxy).
  double v2v_hops = 0.0;
};

LaneMcResult monte_carlo_lane(const LaneParams& p, LaneMode mode,
                              std::int64_t trials, Seed seed);

// V2V throughput proxy: relay hops per sensing vehicle normalized by the same
// count at full penetration. Trials share random numbers across p_s values.
double v2v_throughput_proxy(const LaneParams& p, LaneMode mode,
                            std::int64_t trials, Seed seed);

}  // namespace covsim::v2i
