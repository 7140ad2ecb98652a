#pragma once

#include <span>
#include <vector>

#include "covsim/environment.hpp"
#include "covsim/rng.hpp"

namespace covsim::pointprocess {

// Homogeneous Poisson point process of the given intensity (points per m^2)
// on the window. Deterministic for a given seed.
std::vector<Point2> sample_hppp(double lambda, const Window& w, Seed seed);

struct ThinResult {
  std::vector<Point2> kept;
  std::vector<Point2> removed;
  std::vector<std::uint8_t> kept_mask;  // one flag per input point
};

// Independent thinning: every point kept with probability p.
ThinResult thin(std::span<const Point2> points, double p, Seed seed);

// 1-D hard-core lane process: positions on [0, lane_length] with pairwise
// gaps >= min_gap and expected density equal to target_density.
//
// Construction: a stationary hard-core renewal process whose gaps are
// min_gap + Exp(mu), equivalent to a left-to-right sequential hard-core
// thinning of a base Poisson stream of rate mu. Inverting the retention
// relation lambda_out = mu / (1 + mu * min_gap) gives
// mu = target / (1 - target * min_gap), so any target below the packing
// bound 1/min_gap is matched exactly in expectation. The first point is
// drawn from the equilibrium delay distribution so the finite window sees
// the stationary law.
//
// Throws std::invalid_argument when target_density >= 1/min_gap.
std::vector<double> sample_matern_lane(double lane_length, double min_gap,
                                       double target_density, Seed seed);

// Translates each point by velocity * t. Throws on length mismatch.
std::vector<Point2> displace(std::span<const Point2> points,
                             std::span<const Vec2> velocities, double t);

// Marked environment with constant marks: every object gets object_shape;
// sensors (chosen by independent p_s-thinning) get sensor_offset and
// sensor_support. The model admits general mark distributions, but every
// experiment in scope uses constant marks.
struct EnvironmentParams {
  double lambda = 0.0;
  double p_s = 0.0;
  ConvexShape object_shape = geometry::Disc{1.67};
  Point2 sensor_offset{0.0, 0.0};
  RadialSupport sensor_support = geometry::OmniSupport{100.0};
};

EnvironmentSnapshot sample_environment(const EnvironmentParams& params,
                                       const Window& w, Seed seed);

// Same, with an extra conditioned reference object (id 0, always a sensor)
// at the given location; the rest of the process is unaffected.
EnvironmentSnapshot sample_environment_with_reference(
    const EnvironmentParams& params, const Window& w, Point2 ref_location,
    Seed seed);

}  // namespace covsim::pointprocess
