#include "covsim/environment.hpp"

#include <cmath>
#include <stdexcept>

namespace covsim {

EnvironmentSnapshot::EnvironmentSnapshot(std::vector<MarkedObject> objects,
                                         Window window)
    : objects_(std::move(objects)), window_(window) {
  if (window_.width() <= 0.0 || window_.height() <= 0.0 ||
      window_.guard_margin < 0.0) {
    throw std::invalid_argument("EnvironmentSnapshot: degenerate window");
  }
  by_id_.reserve(objects_.size());
  double max_r = 0.0;
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    const auto& o = objects_[i];
    if (!by_id_.emplace(o.id, i).second) {
      throw std::invalid_argument("EnvironmentSnapshot: duplicate object id");
    }
    if (o.sensor && !geometry::point_in_shape(
                        {o.placed.center + o.sensor->offset}, o.placed)) {
      throw std::invalid_argument(
          "EnvironmentSnapshot: sensor offset outside the object shape");
    }
    max_r = std::max(max_r, geometry::shape_circumradius(o.placed.shape));
  }
  max_circumradius_ = max_r;

  cell_ = std::max(8.0, 2.0 * max_r);
  grid_x0_ = window_.x_min - max_r - 1.0;
  grid_y0_ = window_.y_min - max_r - 1.0;
  const double gx1 = window_.x_max + max_r + 1.0;
  const double gy1 = window_.y_max + max_r + 1.0;
  nx_ = std::max(1, static_cast<int>(std::ceil((gx1 - grid_x0_) / cell_)));
  ny_ = std::max(1, static_cast<int>(std::ceil((gy1 - grid_y0_) / cell_)));
  buckets_.assign(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_),
                  {});

  const double inflate = 1e-6;
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    const auto& o = objects_[i];
    const double r = geometry::shape_circumradius(o.placed.shape) + inflate;
    const int bx0 = clamp_bx(o.placed.center.x - r);
    const int bx1 = clamp_bx(o.placed.center.x + r);
    const int by0 = clamp_by(o.placed.center.y - r);
    const int by1 = clamp_by(o.placed.center.y + r);
    for (int by = by0; by <= by1; ++by) {
      for (int bx = bx0; bx <= bx1; ++bx) {
        buckets_[bucket_index(bx, by)].push_back(static_cast<std::int32_t>(i));
      }
    }
  }
}

const MarkedObject* EnvironmentSnapshot::find(std::int32_t id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &objects_[it->second];
}

std::vector<std::int32_t> EnvironmentSnapshot::sensor_ids() const {
  std::vector<std::int32_t> ids;
  for (const auto& o : objects_) {
    if (o.is_sensor()) ids.push_back(o.id);
  }
  return ids;
}

}  // namespace covsim
