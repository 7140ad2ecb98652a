#pragma once

#include <cmath>
#include <variant>
#include <vector>

namespace covsim::geometry {

// Absolute geometric tolerance in meters. Grazing contacts within this
// distance of an exempt target point count as non-blocking.
inline constexpr double kGeomEps = 1e-9;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Point2 o) const { return x * o.x + y * o.y; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
};
using Vec2 = Point2;

inline double distance(Point2 a, Point2 b) { return (a - b).norm(); }

struct Segment {
  Point2 a;
  Point2 b;
  double length() const { return distance(a, b); }
};

struct Disc {
  double radius = 0.0;
};

// Oriented rectangle: extents are half_length along the heading direction and
// half_width across it.
struct Rect {
  double half_length = 0.0;
  double half_width = 0.0;
  double heading = 0.0;
};

using ConvexShape = std::variant<Disc, Rect>;

double shape_area(const ConvexShape& s);
double shape_perimeter(const ConvexShape& s);
// Radius of the smallest origin-centered disc containing the shape.
double shape_circumradius(const ConvexShape& s);

struct PlacedShape {
  Point2 center;
  ConvexShape shape;
};

struct OmniSupport {
  double r_max = 0.0;
};
struct SectorSupport {
  double r_max = 0.0;
  double center_angle = 0.0;
  double width = 0.0;
};
// r_max sampled on a uniform angular grid over [0, 2pi); lookups use the
// nearest grid angle.
struct PiecewiseSupport {
  std::vector<double> r_max;
};
using RadialSupport = std::variant<OmniSupport, SectorSupport, PiecewiseSupport>;

// Maximum sensing range in direction theta (radians).
double support_range(const RadialSupport& s, double theta);
// Upper bound of r_max over all directions.
double support_bound(const RadialSupport& s);
// True iff the displacement `rel` from the sensor lies inside the support.
bool support_contains(const RadialSupport& s, Vec2 rel);

// Membership in the closed set occupied by the object.
bool point_in_shape(Point2 p, const PlacedShape& obj);

// True iff seg intersects obj at any point other than the exempt target
// (the sensed location, seg.b). An intersection contained in the eps-ball
// around the target does not block, so a target on the object's near surface
// stays visible.
bool segment_shape_intersects(const Segment& seg, const PlacedShape& obj,
                              Point2 target_exempt);

// Area of the Minkowski dilation of a length-`seg_len` segment by the shape.
// Exact for discs (pi r^2 + 2 r L); for rectangles the orientation-averaged
// value area + L * perimeter / pi is returned.
double minkowski_segment_dilation_area(double seg_len, const ConvexShape& shape);

// k points uniformly spaced by arc length on the boundary. Discs start at
// angle 0; rectangles start at the (+half_length, -half_width) corner and
// walk counterclockwise. Deterministic for a given (obj, k).
std::vector<Point2> boundary_samples(const PlacedShape& obj, int k);

}  // namespace covsim::geometry
