#include "covsim/sensing.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace covsim::sensing {

namespace {

constexpr double kPi = std::numbers::pi;

// Area of b(0, r) intersected with the band |y| <= h.
double disc_band_area(double r, double h) {
  if (r <= 0.0) return 0.0;
  if (h >= r) return kPi * r * r;
  if (h <= 0.0) return 0.0;
  return 2.0 * (h * std::sqrt(r * r - h * h) + r * r * std::asin(h / r));
}

struct SensorView {
  const MarkedObject* obj;
  Point2 pos;
  double reach;  // support bound + eps margin for the distance prefilter
};

SensorView make_view(const MarkedObject& o) {
  return {&o, o.sensor_pos(),
          geometry::support_bound(o.sensor->support) + geometry::kGeomEps};
}

}  // namespace

bool roi_contains(const RegionOfInterest& roi, Point2 p) {
  return std::visit(
      [p](const auto& r) -> bool {
        using T = std::decay_t<decltype(r)>;
        if ((p - r.center).norm2() > r.radius * r.radius) return false;
        if constexpr (std::is_same_v<T, RoiDiscStrip>) {
          return std::abs(p.y - r.center.y) <= r.strip_half_width;
        } else {
          return true;
        }
      },
      roi);
}

double roi_area(const RegionOfInterest& roi) {
  return std::visit(
      [](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, RoiDiscStrip>) {
          return disc_band_area(r.radius, r.strip_half_width);
        } else {
          return kPi * r.radius * r.radius;
        }
      },
      roi);
}

Point2 roi_center(const RegionOfInterest& roi) {
  return std::visit([](const auto& r) { return r.center; }, roi);
}

double roi_radius(const RegionOfInterest& roi) {
  return std::visit([](const auto& r) { return r.radius; }, roi);
}

bool segment_blocked(const EnvironmentSnapshot& env, Point2 from, Point2 target,
                     std::int32_t skip_a, std::int32_t skip_b) {
  const Segment seg{from, target};
  bool blocked = false;
  env.for_each_near_segment(seg, [&](std::int32_t idx) {
    const MarkedObject& o = env.objects()[static_cast<std::size_t>(idx)];
    if (o.id == skip_a || o.id == skip_b) return true;
    if (geometry::segment_shape_intersects(seg, o.placed, target)) {
      blocked = true;
      return false;
    }
    return true;
  });
  return blocked;
}

bool location_covered_by(const EnvironmentSnapshot& env,
                         const MarkedObject& sensor, Point2 x) {
  const Point2 pos = sensor.sensor_pos();
  if (!geometry::support_contains(sensor.sensor->support, x - pos)) return false;
  if (geometry::point_in_shape(x, sensor.placed)) return true;
  return !segment_blocked(env, pos, x, sensor.id);
}

std::size_t CoverageGrid::cells_in_region() const {
  std::size_t n = 0;
  for (auto v : in_region) n += v;
  return n;
}

std::size_t CoverageGrid::cells_with_count_at_least(int gamma) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (in_region[i] && counts[i] >= gamma) ++n;
  }
  return n;
}

CoverageGrid redundancy_grid(const EnvironmentSnapshot& env,
                             std::span<const std::int32_t> collaborators,
                             const RegionOfInterest& roi, double resolution,
                             const GridOptions& opts) {
  if (resolution <= 0.0) {
    throw std::invalid_argument("redundancy_grid: resolution must be > 0");
  }
  const Point2 c = roi_center(roi);
  const double r = roi_radius(roi);

  std::vector<SensorView> views;
  views.reserve(collaborators.size());
  for (std::int32_t id : collaborators) {
    const MarkedObject* o = env.find(id);
    if (o == nullptr || !o->is_sensor()) {
      throw std::invalid_argument("redundancy_grid: collaborator is not a sensor");
    }
    SensorView v = make_view(*o);
    // A sensor whose support cannot reach the region never contributes.
    if (distance(v.pos, c) > v.reach + r) continue;
    views.push_back(v);
  }
  CoverageGrid grid;
  grid.resolution = resolution;
  grid.origin = {c.x - r, c.y - r};
  grid.nx = static_cast<int>(std::ceil(2.0 * r / resolution));
  grid.ny = grid.nx;
  const std::size_t n_cells =
      static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny);
  grid.counts.assign(n_cells, 0);
  grid.occupied.assign(n_cells, 0);
  grid.in_region.assign(n_cells, 0);

  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const Point2 x = grid.cell_center(ix, iy);
      const std::size_t i = grid.index(ix, iy);
      if (!roi_contains(roi, x)) continue;
      if (opts.y_band &&
          (x.y < opts.y_band->first || x.y > opts.y_band->second)) {
        continue;
      }
      grid.in_region[i] = 1;

      if (opts.compute_occupied) {
        bool occ = false;
        env.for_each_near(x, 0.0, [&](std::int32_t idx) {
          if (!occ &&
              geometry::point_in_shape(
                  x, env.objects()[static_cast<std::size_t>(idx)].placed)) {
            occ = true;
          }
        });
        grid.occupied[i] = occ ? 1 : 0;
      }

      std::uint16_t count = 0;
      for (const SensorView& v : views) {
        const double d2 = (x - v.pos).norm2();
        if (d2 > v.reach * v.reach) continue;
        if (location_covered_by(env, *v.obj, x)) ++count;
      }
      grid.counts[i] = count;
    }
  }
  return grid;
}

CoverageGrid coverage_set(const EnvironmentSnapshot& env, std::int32_t sensor_id,
                          const RegionOfInterest& roi, double resolution) {
  const MarkedObject* o = env.find(sensor_id);
  if (o == nullptr) throw std::invalid_argument("coverage_set: unknown id");
  if (!o->is_sensor()) {
    throw std::invalid_argument("coverage_set: object carries no sensor mark");
  }
  const std::int32_t ids[1] = {sensor_id};
  return redundancy_grid(env, ids, roi, resolution);
}

double coverage_area(const EnvironmentSnapshot& env, std::int32_t sensor_id,
                     const RegionOfInterest& roi, double resolution) {
  const CoverageGrid grid = coverage_set(env, sensor_id, roi, resolution);
  return static_cast<double>(grid.cells_with_count_at_least(1)) * resolution *
         resolution;
}

int redundancy_at(const EnvironmentSnapshot& env,
                  std::span<const std::int32_t> collaborators, Point2 x) {
  int count = 0;
  for (std::int32_t id : collaborators) {
    const MarkedObject* o = env.find(id);
    if (o == nullptr || !o->is_sensor()) {
      throw std::invalid_argument("redundancy_at: collaborator is not a sensor");
    }
    if (location_covered_by(env, *o, x)) ++count;
  }
  return count;
}

GammaCoverage gamma_coverage(const EnvironmentSnapshot& env,
                             std::span<const std::int32_t> collaborators,
                             const RegionOfInterest& roi, int gamma,
                             double resolution, const GridOptions& opts) {
  if (gamma < 1) throw std::invalid_argument("gamma_coverage: gamma must be >= 1");
  const CoverageGrid grid = redundancy_grid(env, collaborators, roi, resolution, opts);
  GammaCoverage out;
  const std::size_t region = grid.cells_in_region();
  if (region == 0) return out;
  const std::size_t covered = grid.cells_with_count_at_least(gamma);
  out.area = static_cast<double>(covered) * resolution * resolution;
  out.normalized = static_cast<double>(covered) / static_cast<double>(region);
  return out;
}

double rsu_gamma_gain(const EnvironmentSnapshot& env,
                      std::span<const std::int32_t> collaborators,
                      const RegionOfInterest& roi, int gamma, int gamma_rsu,
                      double resolution, const GridOptions& opts) {
  if (gamma_rsu < 0 || gamma_rsu >= gamma) {
    throw std::invalid_argument("rsu_gamma_gain: need 0 <= gamma_rsu < gamma");
  }
  const CoverageGrid grid = redundancy_grid(env, collaborators, roi, resolution, opts);
  const std::size_t region = grid.cells_in_region();
  if (region == 0) return 0.0;
  const auto reduced = grid.cells_with_count_at_least(gamma - gamma_rsu);
  const auto full = grid.cells_with_count_at_least(gamma);
  return static_cast<double>(reduced - full) / static_cast<double>(region);
}

}  // namespace covsim::sensing
