#include "covsim/geometry.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

namespace covsim::geometry {

namespace {

constexpr double kPi = std::numbers::pi;

Point2 rotate(Point2 p, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

// Parameter interval [t0, t1] (within [0, 1]) where the segment meets the
// closed shape; returns false when they are disjoint.
bool clip_to_disc(Point2 a, Point2 d, double len2, Point2 center, double r,
                  double* t0, double* t1) {
  const Point2 m = center - a;
  const double proj = d.dot(m);
  const double disc = proj * proj - len2 * (m.norm2() - r * r);
  if (disc < 0.0) return false;
  const double sq = std::sqrt(disc);
  double lo = (proj - sq) / len2;
  double hi = (proj + sq) / len2;
  lo = std::max(lo, 0.0);
  hi = std::min(hi, 1.0);
  if (lo > hi) return false;
  *t0 = lo;
  *t1 = hi;
  return true;
}

// Liang-Barsky clip of the segment p + t*(q-p), t in [0,1], to the box
// [-hl, hl] x [-hw, hw].
bool clip_to_box(Point2 p, Point2 q, double hl, double hw, double* t0,
                 double* t1) {
  const Point2 d = q - p;
  double lo = 0.0, hi = 1.0;
  const double pp[4] = {-d.x, d.x, -d.y, d.y};
  const double qq[4] = {p.x + hl, hl - p.x, p.y + hw, hw - p.y};
  for (int i = 0; i < 4; ++i) {
    if (pp[i] == 0.0) {
      if (qq[i] < 0.0) return false;
      continue;
    }
    const double t = qq[i] / pp[i];
    if (pp[i] < 0.0) {
      lo = std::max(lo, t);
    } else {
      hi = std::min(hi, t);
    }
  }
  if (lo > hi) return false;
  *t0 = lo;
  *t1 = hi;
  return true;
}

}  // namespace

double shape_area(const ConvexShape& s) {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Disc>) {
          return kPi * v.radius * v.radius;
        } else {
          return 4.0 * v.half_length * v.half_width;
        }
      },
      s);
}

double shape_perimeter(const ConvexShape& s) {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Disc>) {
          return 2.0 * kPi * v.radius;
        } else {
          return 4.0 * (v.half_length + v.half_width);
        }
      },
      s);
}

double shape_circumradius(const ConvexShape& s) {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Disc>) {
          return v.radius;
        } else {
          return std::hypot(v.half_length, v.half_width);
        }
      },
      s);
}

double support_range(const RadialSupport& s, double theta) {
  return std::visit(
      [theta](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, OmniSupport>) {
          return v.r_max;
        } else if constexpr (std::is_same_v<T, SectorSupport>) {
          double d = std::remainder(theta - v.center_angle, 2.0 * kPi);
          return std::abs(d) <= 0.5 * v.width ? v.r_max : 0.0;
        } else {
          if (v.r_max.empty()) return 0.0;
          const double n = static_cast<double>(v.r_max.size());
          double u = std::fmod(theta, 2.0 * kPi);
          if (u < 0.0) u += 2.0 * kPi;
          auto idx = static_cast<std::size_t>(std::lround(u / (2.0 * kPi) * n)) %
                     v.r_max.size();
          return v.r_max[idx];
        }
      },
      s);
}

double support_bound(const RadialSupport& s) {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PiecewiseSupport>) {
          double m = 0.0;
          for (double r : v.r_max) m = std::max(m, r);
          return m;
        } else {
          return v.r_max;
        }
      },
      s);
}

bool support_contains(const RadialSupport& s, Vec2 rel) {
  if (const auto* omni = std::get_if<OmniSupport>(&s)) {
    const double r = omni->r_max + kGeomEps;
    return rel.norm2() <= r * r;
  }
  const double d = rel.norm();
  if (d <= kGeomEps) return support_range(s, 0.0) >= 0.0;
  return d <= support_range(s, std::atan2(rel.y, rel.x)) + kGeomEps;
}

bool point_in_shape(Point2 p, const PlacedShape& obj) {
  return std::visit(
      [&](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Disc>) {
          const double r = v.radius + kGeomEps;
          return (p - obj.center).norm2() <= r * r;
        } else {
          const Point2 local = rotate(p - obj.center, -v.heading);
          return std::abs(local.x) <= v.half_length + kGeomEps &&
                 std::abs(local.y) <= v.half_width + kGeomEps;
        }
      },
      obj.shape);
}

bool segment_shape_intersects(const Segment& seg, const PlacedShape& obj,
                              Point2 target_exempt) {
  const Point2 d = seg.b - seg.a;
  const double len2 = d.norm2();
  if (len2 <= kGeomEps * kGeomEps) {
    // Degenerate segment: the intersection can only be {seg.b}.
    return false;
  }
  double t0 = 0.0, t1 = 0.0;
  const bool hit = std::visit(
      [&](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Disc>) {
          return clip_to_disc(seg.a, d, len2, obj.center, v.radius, &t0, &t1);
        } else {
          const Point2 p = rotate(seg.a - obj.center, -v.heading);
          const Point2 q = rotate(seg.b - obj.center, -v.heading);
          return clip_to_box(p, q, v.half_length, v.half_width, &t0, &t1);
        }
      },
      obj.shape);
  if (!hit) return false;
  // The intersection is the sub-segment [t0, t1]; it blocks unless it lies
  // within kGeomEps of the exempt target.
  const Point2 entry = seg.a + d * t0;
  return distance(entry, target_exempt) > kGeomEps;
}

double minkowski_segment_dilation_area(double seg_len, const ConvexShape& shape) {
  if (seg_len < 0.0) {
    throw std::invalid_argument("minkowski_segment_dilation_area: negative length");
  }
  return std::visit(
      [seg_len](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Disc>) {
          return kPi * v.radius * v.radius + 2.0 * v.radius * seg_len;
        } else {
          return 4.0 * v.half_length * v.half_width +
                 seg_len * 4.0 * (v.half_length + v.half_width) / kPi;
        }
      },
      shape);
}

std::vector<Point2> boundary_samples(const PlacedShape& obj, int k) {
  if (k < 4) throw std::invalid_argument("boundary_samples: k must be >= 4");
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(k));
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Disc>) {
          for (int j = 0; j < k; ++j) {
            const double ang = 2.0 * kPi * j / k;
            pts.push_back(obj.center +
                          Point2{v.radius * std::cos(ang), v.radius * std::sin(ang)});
          }
        } else {
          const double hl = v.half_length, hw = v.half_width;
          const double per = 4.0 * (hl + hw);
          // Corner-to-corner walk: right edge up, top edge left, left edge
          // down, bottom edge right, starting from (hl, -hw).
          const double e1 = 2.0 * hw, e2 = e1 + 2.0 * hl, e3 = e2 + 2.0 * hw;
          for (int j = 0; j < k; ++j) {
            const double s = per * j / k;
            Point2 local;
            if (s < e1) {
              local = {hl, -hw + s};
            } else if (s < e2) {
              local = {hl - (s - e1), hw};
            } else if (s < e3) {
              local = {-hl, hw - (s - e2)};
            } else {
              local = {-hl + (s - e3), -hw};
            }
            pts.push_back(obj.center + rotate(local, v.heading));
          }
        }
      },
      obj.shape);
  return pts;
}

}  // namespace covsim::geometry
