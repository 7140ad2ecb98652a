#pragma once

#include <cstdint>
#include <vector>

#include "covsim/analytics.hpp"
#include "covsim/pointprocess.hpp"
#include "covsim/sensing.hpp"

namespace covsim::montecarlo {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // standard error over seeds
  int n = 0;        // number of seeds
};

// Ids of every object that would view x if it carried a centered omni sensor
// of radius r_sense (x inside the body counts, per the coverage-set rule).
// Sensor marks are irrelevant here so one visibility pass serves every
// thinning level.
std::vector<std::int32_t> viewers_of(const EnvironmentSnapshot& env, Point2 x,
                                     double r_sense);

// Monte Carlo of the expected coverage area of a typical sensor: a
// conditioned sensor at the origin of a fresh realization per seed, coverage
// rasterized over the full disc support.
MeanSe coverage_area_mc(const analytics::DiscModelParams& p, int seeds,
                        double resolution, Seed seed, int jobs);

// Empirical redundancy of uniformly random void locations, evaluated for all
// requested p_s levels on shared realizations (coupled thinning, so the
// analytic linearity in p_s can be tested within Monte Carlo error).
std::vector<MeanSe> void_redundancy_mc(const analytics::DiscModelParams& p,
                                       std::vector<double> ps, int seeds,
                                       int points_per_seed, Seed seed, int jobs);

struct GammaMcGrid {
  std::vector<int> gammas;
  std::vector<double> ps;
  std::vector<MeanSe> cells;  // gammas-major

  const MeanSe& at(std::size_t gamma_idx, std::size_t p_idx) const {
    return cells[gamma_idx * ps.size() + p_idx];
  }
};

// Monte Carlo of the normalized gamma-coverage of a typical sensing vehicle
// in the disc model, point-sampled inside the region of interest. One
// visibility pass per sample point serves the whole (gamma, p_s) grid.
GammaMcGrid gamma_coverage_mc(const analytics::DiscModelParams& p,
                              const analytics::RoiSpec& roi,
                              std::vector<int> gammas, std::vector<double> ps,
                              int seeds, int points_per_seed, Seed seed,
                              int jobs);

}  // namespace covsim::montecarlo
