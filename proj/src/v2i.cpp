#include "covsim/v2i.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace covsim::v2i {

namespace {

struct ColumnStep {
  int x_next = 0;
  bool v2i = false;
  int dl_count = 0;    // unicast downlinks needed by this column
  int v2v_hops = 0;    // relay transmissions into / inside this column
};

// One column transition of the grid chain. Bit 0 = lane 1, bit 1 = center
// lane, bit 2 = lane 3.
ColumnStep column_step(int x, int s, SharingMode mode) {
  const int x1 = x & 1, x2 = (x >> 1) & 1, x3 = (x >> 2) & 1;
  const int s1 = s & 1, s2 = (s >> 1) & 1, s3 = (s >> 2) & 1;

  // Forward lane links, then sharing inside the column.
  const int xt1 = x1 & s1, xt2 = x2 & s2, xt3 = x3 & s3;
  const int xh1 = xt1 | (s1 & (xt2 | (xt3 & s2)));
  const int xh2 = xt2 | (s2 & (xt1 | xt3));
  const int xh3 = xt3 | (s3 & (xt2 | (xt1 & s2)));

  ColumnStep out;
  out.v2v_hops = (xt1 + xt2 + xt3)            // lane links carrying data forward
                 + ((xh1 - xt1) + (xh2 - xt2) + (xh3 - xt3));  // intra-column relays

  bool trigger;
  if (mode == SharingMode::same_lane) {
    trigger = (s2 == 1 && xh2 == 0);
    out.dl_count = trigger ? 1 : 0;
  } else {
    trigger = (s1 && !xh1) || (s2 && !xh2) || (s3 && !xh3);
    // One downlink per connected run of sensing vehicles without the data;
    // the recipient relays to the rest of its run.
    if (s2) {
      out.dl_count = xh2 ? 0 : 1;
    } else {
      out.dl_count = (s1 && !xh1) + (s3 && !xh3);
    }
  }
  if (trigger) {
    // Downlink recipients relay to the remaining needy sensing vehicles.
    const int needy = (s1 && !xh1) + (s2 && !xh2) + (s3 && !xh3);
    out.v2v_hops += needy - out.dl_count;
    out.x_next = s;
  } else {
    out.x_next = (xh1) | (xh2 << 1) | (xh3 << 2);
  }
  out.v2i = trigger;
  return out;
}

double outcome_prob(int s, double p_s) {
  const int n = (s & 1) + ((s >> 1) & 1) + ((s >> 2) & 1);
  return std::pow(p_s, n) * std::pow(1.0 - p_s, 3 - n);
}

// Distribution over the 16 chain states for column 0, conditioned on the
// reference center-lane vehicle being a sensing vehicle.
std::array<double, TransitionMatrix::kStates> initial_distribution(double p_s) {
  std::array<double, TransitionMatrix::kStates> pi{};
  for (int s1 = 0; s1 <= 1; ++s1) {
    for (int s3 = 0; s3 <= 1; ++s3) {
      const double pr = (s1 ? p_s : 1.0 - p_s) * (s3 ? p_s : 1.0 - p_s);
      pi[TransitionMatrix::state(s1 | 2 | (s3 << 2), 0)] += pr;
    }
  }
  return pi;
}

using Matrix = std::array<std::array<double, 16>, 16>;

Matrix multiply(const Matrix& a, const Matrix& b) {
  Matrix c{};
  for (int i = 0; i < 16; ++i) {
    for (int k = 0; k < 16; ++k) {
      const double aik = a[i][k];
      if (aik == 0.0) continue;
      for (int j = 0; j < 16; ++j) c[i][j] += aik * b[k][j];
    }
  }
  return c;
}

}  // namespace

void LaneParams::validate() const {
  if (eta < 1) throw std::invalid_argument("LaneParams: eta must be >= 1");
  if (p_s < 0.0 || p_s > 1.0) throw std::invalid_argument("LaneParams: p_s outside [0,1]");
  if (speed_s <= 0.0 || t_gap <= 0.0 || segment_d <= 0.0 || nu <= 0.0) {
    throw std::invalid_argument("LaneParams: non-positive parameter");
  }
  const int expected = static_cast<int>(std::floor(t_interest / t_gap + 1e-9));
  if (eta != expected) {
    throw std::invalid_argument("LaneParams: eta must equal floor(t_interest/t_gap)");
  }
}

double p_front(int eta, double p_s) {
  double sum = 0.0;
  for (int k = 0; k <= eta; ++k) {
    sum += std::pow(p_s, k) * std::pow(1.0 - p_s, eta - k);
  }
  return 1.0 - sum;
}

double p_v2i(int eta, double p_s) {
  const double pf = p_front(eta, p_s);
  return 1.0 - (1.0 - pf) * (1.0 - pf);
}

CapacityResult single_lane_capacity(const LaneParams& p) {
  p.validate();
  CapacityResult out;
  out.e_n_uplink = p_v2i(p.eta, p.p_s);
  out.e_n_dl_unicast =
      p.eta >= 2 ? 2.0 * (p.eta - 1) * p.p_s * (1.0 - p.p_s) : 0.0;
  const double scale = p.p_s * p.lambda_vehicle() * p.segment_d * p.nu;
  out.c_ul = scale * out.e_n_uplink;
  out.c_dl_broadcast = out.c_ul;
  out.c_dl_unicast = scale * out.e_n_dl_unicast;
  const double norm = p.lambda_vehicle() * p.segment_d * p.nu;
  out.c_ul_norm = out.c_ul / norm;
  out.c_dl_broadcast_norm = out.c_dl_broadcast / norm;
  out.c_dl_unicast_norm = out.c_dl_unicast / norm;
  return out;
}

double TransitionMatrix::max_row_error() const {
  double worst = 0.0;
  for (const auto& row : p) {
    double sum = 0.0;
    for (double v : row) sum += v;
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

TransitionMatrix build_transition_matrix(double p_s, SharingMode mode) {
  if (p_s < 0.0 || p_s > 1.0) {
    throw std::invalid_argument("build_transition_matrix: p_s outside [0,1]");
  }
  TransitionMatrix m;
  for (int state = 0; state < TransitionMatrix::kStates; ++state) {
    const int x = TransitionMatrix::x_of(state);
    const int y = TransitionMatrix::y_of(state);
    for (int s = 0; s < 8; ++s) {
      const ColumnStep step = column_step(x, s, mode);
      const int y_next = y | (step.v2i ? 1 : 0);
      m.p[state][TransitionMatrix::state(step.x_next, y_next)] +=
          outcome_prob(s, p_s);
    }
  }
  return m;
}

GridCapacity grid_capacity(int eta, double p_s, SharingMode mode) {
  if (eta < 1) throw std::invalid_argument("grid_capacity: eta must be >= 1");
  const TransitionMatrix tm = build_transition_matrix(p_s, mode);

  Matrix power = tm.p;
  for (int k = 1; k < eta; ++k) power = multiply(power, tm.p);

  // P(Y_eta = 1 | Z_0 = i) for every basis state.
  std::array<double, 16> tail{};
  for (int i = 0; i < 16; ++i) {
    double t = 0.0;
    for (int j = 0; j < 16; ++j) {
      if (TransitionMatrix::y_of(j) == 1) t += power[i][j];
    }
    tail[i] = t;
  }

  const auto pi0 = initial_distribution(p_s);
  GridCapacity out;
  for (int i = 0; i < 16; ++i) {
    if (pi0[i] == 0.0) continue;
    out.p_v2i += pi0[i] * (1.0 - (1.0 - tail[i]) * (1.0 - tail[i]));
  }
  out.e_n_uplink = out.p_v2i;

  // Expected unicast downlinks per column, from the 8-state X marginal.
  std::array<double, 8> px{};
  for (int s1 = 0; s1 <= 1; ++s1) {
    for (int s3 = 0; s3 <= 1; ++s3) {
      px[s1 | 2 | (s3 << 2)] +=
          (s1 ? p_s : 1.0 - p_s) * (s3 ? p_s : 1.0 - p_s);
    }
  }
  double dl_one_direction = 0.0;
  for (int k = 1; k <= eta; ++k) {
    std::array<double, 8> next{};
    for (int x = 0; x < 8; ++x) {
      if (px[x] == 0.0) continue;
      for (int s = 0; s < 8; ++s) {
        const double pr = px[x] * outcome_prob(s, p_s);
        if (pr == 0.0) continue;
        const ColumnStep step = column_step(x, s, mode);
        dl_one_direction += pr * step.dl_count;
        next[step.x_next] += pr;
      }
    }
    px = next;
  }
  out.e_n_dl_unicast = 2.0 * dl_one_direction;

  out.c_ul_norm = p_s * out.e_n_uplink;
  out.c_dl_broadcast_norm = out.c_ul_norm;
  out.c_dl_unicast_norm = p_s * out.e_n_dl_unicast;
  return out;
}

namespace {

struct TrialStats {
  int uplink = 0;
  int dl = 0;
  int hops = 0;
};

TrialStats run_single_lane_trial(Rng& rng, int eta, double p_s) {
  TrialStats st;
  bool fwd_needy = false, bwd_needy = false;
  for (int dir = 0; dir < 2; ++dir) {
    bool gap_seen = false, needy = false;
    bool prev = true;  // the reference itself holds its data
    for (int i = 1; i <= eta; ++i) {
      const bool sensing = rng.bernoulli(p_s);
      if (sensing) {
        if (gap_seen) needy = true;
        if (prev) ++st.hops;              // V2V hop from the previous holder
        if (i >= 2 && !prev) ++st.dl;     // unicast downlink fills the gap
      } else {
        gap_seen = true;
      }
      prev = sensing;
    }
    (dir == 0 ? fwd_needy : bwd_needy) = needy;
  }
  st.uplink = (fwd_needy || bwd_needy) ? 1 : 0;
  return st;
}

TrialStats run_grid_trial(Rng& rng, int eta, double p_s, SharingMode mode) {
  TrialStats st;
  const int s1_0 = rng.bernoulli(p_s) ? 1 : 0;
  const int s3_0 = rng.bernoulli(p_s) ? 1 : 0;
  const int x0 = s1_0 | 2 | (s3_0 << 2);
  st.hops += s1_0 + s3_0;  // reference hands data to its lateral neighbors
  bool any = false;
  for (int dir = 0; dir < 2; ++dir) {
    int x = x0;
    for (int k = 1; k <= eta; ++k) {
      const int s = (rng.bernoulli(p_s) ? 1 : 0) | (rng.bernoulli(p_s) ? 2 : 0) |
                    (rng.bernoulli(p_s) ? 4 : 0);
      const ColumnStep step = column_step(x, s, mode);
      st.dl += step.dl_count;
      st.hops += step.v2v_hops;
      if (step.v2i) any = true;
      x = step.x_next;
    }
  }
  st.uplink = any ? 1 : 0;
  return st;
}

// Total uplink transmissions over a road segment of m vehicles: every sensing
// vehicle in the segment contributes its own uplink indicator, evaluated on a
// shared chain of m + 2 eta vehicles.
int segment_uplink_count_single(Rng& rng, int eta, double p_s, int m) {
  const int n = m + 2 * eta;
  std::vector<std::uint8_t> bits(n);
  for (int i = 0; i < n; ++i) bits[i] = rng.bernoulli(p_s) ? 1 : 0;
  // prefix[i] = number of sensing vehicles among bits[0..i)
  std::vector<int> prefix(n + 1, 0);
  for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + bits[i];
  // run[i] = length of the sensing run starting at i
  std::vector<int> run(n + 1, 0);
  for (int i = n - 1; i >= 0; --i) run[i] = bits[i] ? run[i + 1] + 1 : 0;

  auto needy_right = [&](int i) {
    const int hi = std::min(i + eta, n - 1);
    const int reach = std::min(run[i + 1], eta);
    const int beyond_start = i + reach + 1;
    if (beyond_start > hi) return false;
    return prefix[hi + 1] - prefix[beyond_start] > 0;
  };
  auto needy_left = [&](int i) {
    const int lo = std::max(i - eta, 0);
    int reach = 0;
    while (reach < eta && i - 1 - reach >= 0 && bits[i - 1 - reach]) ++reach;
    const int beyond_end = i - reach - 1;
    if (beyond_end < lo) return false;
    return prefix[beyond_end + 1] - prefix[lo] > 0;
  };

  int count = 0;
  for (int i = eta; i < eta + m; ++i) {
    if (!bits[i]) continue;
    if (needy_right(i) || needy_left(i)) ++count;
  }
  return count;
}

int segment_uplink_count_grid(Rng& rng, int eta, double p_s, int m,
                              SharingMode mode) {
  const int n = m + 2 * eta;
  std::vector<std::uint8_t> lane1(n), lane2(n), lane3(n);
  for (int i = 0; i < n; ++i) {
    lane1[i] = rng.bernoulli(p_s) ? 1 : 0;
    lane2[i] = rng.bernoulli(p_s) ? 1 : 0;
    lane3[i] = rng.bernoulli(p_s) ? 1 : 0;
  }
  int count = 0;
  for (int i = eta; i < eta + m; ++i) {
    if (!lane2[i]) continue;
    const int x0 = lane1[i] | 2 | (lane3[i] << 2);
    bool any = false;
    for (int dir = 0; dir < 2 && !any; ++dir) {
      int x = x0;
      for (int k = 1; k <= eta; ++k) {
        const int j = dir == 0 ? i + k : i - k;
        if (j < 0 || j >= n) break;
        const int s = lane1[j] | (lane2[j] << 1) | (lane3[j] << 2);
        const ColumnStep step = column_step(x, s, mode);
        if (step.v2i) {
          any = true;
          break;
        }
        x = step.x_next;
      }
    }
    if (any) ++count;
  }
  return count;
}

}  // namespace

LaneMcResult monte_carlo_lane(const LaneParams& p, LaneMode mode,
                              std::int64_t trials, Seed seed) {
  p.validate();
  if (trials < 1) throw std::invalid_argument("monte_carlo_lane: trials must be >= 1");
  double sum_up = 0.0, sum_up2 = 0.0, sum_dl = 0.0, sum_dl2 = 0.0, sum_hops = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(t));
    const TrialStats st =
        mode == LaneMode::single_lane
            ? run_single_lane_trial(rng, p.eta, p.p_s)
            : run_grid_trial(rng, p.eta, p.p_s,
                             mode == LaneMode::grid_same_lane
                                 ? SharingMode::same_lane
                                 : SharingMode::all_lanes);
    sum_up += st.uplink;
    sum_up2 += static_cast<double>(st.uplink) * st.uplink;
    sum_dl += st.dl;
    sum_dl2 += static_cast<double>(st.dl) * st.dl;
    sum_hops += st.hops;
  }
  const double n = static_cast<double>(trials);
  LaneMcResult out;
  out.e_n_uplink = sum_up / n;
  out.e_n_dl_unicast = sum_dl / n;
  if (trials > 1) {
    out.se_n_uplink = std::sqrt(
        std::max(0.0, (sum_up2 / n - out.e_n_uplink * out.e_n_uplink) / (n - 1)));
    out.se_n_dl_unicast = std::sqrt(std::max(
        0.0, (sum_dl2 / n - out.e_n_dl_unicast * out.e_n_dl_unicast) / (n - 1)));
  }
  out.c_ul_norm = p.p_s * out.e_n_uplink;
  out.c_dl_broadcast_norm = out.c_ul_norm;
  out.c_dl_unicast_norm = p.p_s * out.e_n_dl_unicast;
  out.v2v_hops = sum_hops / n;

  // Burst statistic over road segments of length segment_d.
  const int m = std::max(1, static_cast<int>(std::lround(
                                p.lambda_vehicle() * p.segment_d)));
  const std::int64_t burst_trials =
      std::min<std::int64_t>(trials, mode == LaneMode::single_lane ? 100000 : 30000);
  std::vector<int> counts(static_cast<std::size_t>(burst_trials));
  double sum_seg = 0.0;
  for (std::int64_t t = 0; t < burst_trials; ++t) {
    Rng rng = make_rng(seed, (1ULL << 40) + static_cast<std::uint64_t>(t));
    const int c =
        mode == LaneMode::single_lane
            ? segment_uplink_count_single(rng, p.eta, p.p_s, m)
            : segment_uplink_count_grid(rng, p.eta, p.p_s, m,
                                        mode == LaneMode::grid_same_lane
                                            ? SharingMode::same_lane
                                            : SharingMode::all_lanes);
    counts[static_cast<std::size_t>(t)] = c;
    sum_seg += c;
  }
  std::sort(counts.begin(), counts.end());
  out.segment_uplink_mean = sum_seg / static_cast<double>(burst_trials);
  const std::size_t idx = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(burst_trials) - 1.0,
                       std::ceil(0.95 * static_cast<double>(burst_trials)) - 1.0));
  out.segment_uplink_p95 = static_cast<double>(counts[idx]);
  return out;
}

double v2v_throughput_proxy(const LaneParams& p, LaneMode mode,
                            std::int64_t trials, Seed seed) {
  LaneParams full = p;
  full.p_s = 1.0;
  const double base = monte_carlo_lane(full, mode, trials, seed).v2v_hops;
  if (base == 0.0) return 0.0;
  return monte_carlo_lane(p, mode, trials, seed).v2v_hops / base;
}

}  // namespace covsim::v2i
