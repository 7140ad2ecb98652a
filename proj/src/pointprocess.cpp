#include "covsim/pointprocess.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace covsim::pointprocess {

std::vector<Point2> sample_hppp(double lambda, const Window& w, Seed seed) {
  if (lambda < 0.0) throw std::invalid_argument("sample_hppp: lambda < 0");
  Rng rng = make_rng(seed);
  const std::uint64_t n = rng.poisson(lambda * w.area());
  std::vector<Point2> pts;
  pts.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double x = rng.uniform(w.x_min, w.x_max);
    const double y = rng.uniform(w.y_min, w.y_max);
    pts.push_back({x, y});
  }
  return pts;
}

ThinResult thin(std::span<const Point2> points, double p, Seed seed) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("thin: p outside [0, 1]");
  Rng rng = make_rng(seed);
  ThinResult out;
  out.kept_mask.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const bool keep = rng.bernoulli(p);
    out.kept_mask[i] = keep ? 1 : 0;
    (keep ? out.kept : out.removed).push_back(points[i]);
  }
  return out;
}

std::vector<double> sample_matern_lane(double lane_length, double min_gap,
                                       double target_density, Seed seed) {
  if (min_gap <= 0.0) throw std::invalid_argument("sample_matern_lane: min_gap <= 0");
  if (target_density < 0.0) {
    throw std::invalid_argument("sample_matern_lane: negative density");
  }
  if (target_density == 0.0) return {};
  const double bound = 1.0 / min_gap;
  if (target_density >= bound) {
    throw std::invalid_argument(
        "sample_matern_lane: target density " + std::to_string(target_density) +
        " is infeasible; the hard-core bound 1/min_gap is " + std::to_string(bound));
  }
  const double mu = target_density / (1.0 - target_density * min_gap);
  Rng rng = make_rng(seed);

  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(target_density * lane_length * 1.3) + 8);

  // Equilibrium delay to the first point: the forward recurrence time of the
  // stationary renewal process with gap G = min_gap + Exp(mu).
  //   P(T <= t) = target * t                                   for t <= min_gap
  //   P(T <= t) = target * (min_gap + (1 - e^{-mu (t-min_gap)})/mu) otherwise
  double x;
  {
    const double v = rng.uniform();
    if (v <= target_density * min_gap) {
      x = v / target_density;
    } else {
      const double rem = v / target_density - min_gap;  // in (0, 1/mu)
      x = min_gap - std::log1p(-rem * mu) / mu;
    }
  }
  while (x <= lane_length) {
    pts.push_back(x);
    x += min_gap + rng.exponential(mu);
  }
  return pts;
}

std::vector<Point2> displace(std::span<const Point2> points,
                             std::span<const Vec2> velocities, double t) {
  if (points.size() != velocities.size()) {
    throw std::invalid_argument("displace: points/velocities length mismatch");
  }
  std::vector<Point2> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.push_back(points[i] + velocities[i] * t);
  }
  return out;
}

namespace {

EnvironmentSnapshot build_environment(const EnvironmentParams& params,
                                      const Window& w, Seed seed,
                                      const Point2* ref_location) {
  if (params.p_s < 0.0 || params.p_s > 1.0) {
    throw std::invalid_argument("EnvironmentParams: p_s outside [0, 1]");
  }
  const auto centers = sample_hppp(params.lambda, w, Seed{seed.root, seed.stream});
  const auto marks = thin(centers, params.p_s, Seed{seed.root, seed.stream + 1});

  std::vector<MarkedObject> objects;
  objects.reserve(centers.size() + 1);
  std::int32_t next_id = 0;
  if (ref_location != nullptr) {
    objects.push_back(MarkedObject{
        next_id++, PlacedShape{*ref_location, params.object_shape},
        SensorMark{params.sensor_offset, params.sensor_support}});
  }
  for (std::size_t i = 0; i < centers.size(); ++i) {
    MarkedObject o;
    o.id = next_id++;
    o.placed = PlacedShape{centers[i], params.object_shape};
    if (marks.kept_mask[i]) {
      o.sensor = SensorMark{params.sensor_offset, params.sensor_support};
    }
    objects.push_back(std::move(o));
  }
  return EnvironmentSnapshot(std::move(objects), w);
}

}  // namespace

EnvironmentSnapshot sample_environment(const EnvironmentParams& params,
                                       const Window& w, Seed seed) {
  return build_environment(params, w, seed, nullptr);
}

EnvironmentSnapshot sample_environment_with_reference(
    const EnvironmentParams& params, const Window& w, Point2 ref_location,
    Seed seed) {
  return build_environment(params, w, seed, &ref_location);
}

}  // namespace covsim::pointprocess
