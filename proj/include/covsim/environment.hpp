#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include "covsim/geometry.hpp"

namespace covsim {

using geometry::ConvexShape;
using geometry::PlacedShape;
using geometry::Point2;
using geometry::RadialSupport;
using geometry::Segment;
using geometry::Vec2;

// Finite simulation window. Statistics are collected only in the inner region,
// the window shrunk by guard_margin on all sides, so that truncation at the
// window edge does not bias them.
struct Window {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
  double guard_margin = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool contains(Point2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  // True iff the disc b(p, shrink_extra) lies inside the guarded inner region.
  bool inner_contains(Point2 p, double shrink_extra = 0.0) const {
    const double m = guard_margin + shrink_extra;
    return p.x >= x_min + m && p.x <= x_max - m && p.y >= y_min + m &&
           p.y <= y_max - m;
  }
};

struct SensorMark {
  Point2 offset{};  // sensor location relative to the object center, inside the shape
  RadialSupport support;
};

struct MarkedObject {
  std::int32_t id = 0;
  PlacedShape placed;
  std::optional<SensorMark> sensor;

  bool is_sensor() const { return sensor.has_value(); }
  Point2 sensor_pos() const { return placed.center + sensor->offset; }
};

// Immutable realization of the marked point process inside a window, with a
// uniform bucket grid for segment/range candidate queries. Safe to share
// across threads once constructed.
class EnvironmentSnapshot {
 public:
  EnvironmentSnapshot() = default;
  EnvironmentSnapshot(std::vector<MarkedObject> objects, Window window);

  const std::vector<MarkedObject>& objects() const { return objects_; }
  const Window& window() const { return window_; }
  std::size_t size() const { return objects_.size(); }

  const MarkedObject* find(std::int32_t id) const;
  std::vector<std::int32_t> sensor_ids() const;
  double max_circumradius() const { return max_circumradius_; }

  // Calls fn(object index) for every object whose bounding circle may touch
  // the segment; fn returns false to stop the walk early. Indices can repeat.
  template <typename F>
  void for_each_near_segment(const Segment& seg, F&& fn) const;

  // Calls fn(object index) for every object whose bounding circle may overlap
  // the disc b(center, radius). Indices can repeat.
  template <typename F>
  void for_each_near(Point2 center, double radius, F&& fn) const;

 private:
  std::size_t bucket_index(int bx, int by) const {
    return static_cast<std::size_t>(by) * static_cast<std::size_t>(nx_) +
           static_cast<std::size_t>(bx);
  }
  int clamp_bx(double x) const {
    return std::clamp(static_cast<int>(std::floor((x - grid_x0_) / cell_)), 0,
                      nx_ - 1);
  }
  int clamp_by(double y) const {
    return std::clamp(static_cast<int>(std::floor((y - grid_y0_) / cell_)), 0,
                      ny_ - 1);
  }

  std::vector<MarkedObject> objects_;
  Window window_;
  std::unordered_map<std::int32_t, std::size_t> by_id_;
  double max_circumradius_ = 0.0;

  double cell_ = 1.0;
  double grid_x0_ = 0.0, grid_y0_ = 0.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<std::int32_t>> buckets_;
};

template <typename F>
void EnvironmentSnapshot::for_each_near_segment(const Segment& seg, F&& fn) const {
  if (objects_.empty()) return;
  // Walk the bucket grid cells crossed by the segment (Amanatides-Woo).
  int bx = clamp_bx(seg.a.x), by = clamp_by(seg.a.y);
  const int ex = clamp_bx(seg.b.x), ey = clamp_by(seg.b.y);
  const double dx = seg.b.x - seg.a.x, dy = seg.b.y - seg.a.y;
  const int step_x = dx > 0 ? 1 : -1, step_y = dy > 0 ? 1 : -1;
  const double t_delta_x = dx != 0.0 ? std::abs(cell_ / dx) : 0.0;
  const double t_delta_y = dy != 0.0 ? std::abs(cell_ / dy) : 0.0;
  double t_max_x, t_max_y;
  if (dx != 0.0) {
    const double edge = grid_x0_ + (bx + (step_x > 0 ? 1 : 0)) * cell_;
    t_max_x = (edge - seg.a.x) / dx;
  } else {
    t_max_x = std::numeric_limits<double>::infinity();
  }
  if (dy != 0.0) {
    const double edge = grid_y0_ + (by + (step_y > 0 ? 1 : 0)) * cell_;
    t_max_y = (edge - seg.a.y) / dy;
  } else {
    t_max_y = std::numeric_limits<double>::infinity();
  }
  const int max_cells = nx_ + ny_ + 2;
  for (int n = 0; n < max_cells; ++n) {
    for (std::int32_t idx : buckets_[bucket_index(bx, by)]) {
      if (!fn(idx)) return;
    }
    if (bx == ex && by == ey) break;
    if (t_max_x < t_max_y) {
      bx += step_x;
      t_max_x += t_delta_x;
      if (bx < 0 || bx >= nx_) break;
    } else {
      by += step_y;
      t_max_y += t_delta_y;
      if (by < 0 || by >= ny_) break;
    }
  }
}

template <typename F>
void EnvironmentSnapshot::for_each_near(Point2 center, double radius, F&& fn) const {
  if (objects_.empty()) return;
  const int bx0 = clamp_bx(center.x - radius), bx1 = clamp_bx(center.x + radius);
  const int by0 = clamp_by(center.y - radius), by1 = clamp_by(center.y + radius);
  for (int by = by0; by <= by1; ++by) {
    for (int bx = bx0; bx <= bx1; ++bx) {
      for (std::int32_t idx : buckets_[bucket_index(bx, by)]) fn(idx);
    }
  }
}

}  // namespace covsim
