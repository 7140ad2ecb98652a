#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "covsim/environment.hpp"

namespace covsim::sensing {

struct RoiDisc {
  Point2 center;
  double radius = 0.0;
};

// Disc clipped to the horizontal band |y - center.y| <= strip_half_width.
struct RoiDiscStrip {
  Point2 center;
  double radius = 0.0;
  double strip_half_width = 0.0;
};

using RegionOfInterest = std::variant<RoiDisc, RoiDiscStrip>;

bool roi_contains(const RegionOfInterest& roi, Point2 p);
double roi_area(const RegionOfInterest& roi);
Point2 roi_center(const RegionOfInterest& roi);
double roi_radius(const RegionOfInterest& roi);

// True iff the closed segment from `from` to `target` crosses any object
// other than skip_a/skip_b at a point that is not the target itself.
bool segment_blocked(const EnvironmentSnapshot& env, Point2 from, Point2 target,
                     std::int32_t skip_a, std::int32_t skip_b = -1);

// Membership of x in the sensor's coverage set: x must lie in the translated
// radial support and either inside the sensor's own body or on an unblocked
// line of sight (the sensor's own body never blocks).
bool location_covered_by(const EnvironmentSnapshot& env,
                         const MarkedObject& sensor, Point2 x);

// Rasterized per-cell redundancy over a region of interest. Coverage and
// redundancy are defined at cell centers; in_region marks cells inside the
// ROI (and the optional y band), occupied marks cells whose center lies
// inside any object.
struct CoverageGrid {
  Point2 origin;
  double resolution = 0.0;
  int nx = 0;
  int ny = 0;
  std::vector<std::uint16_t> counts;
  std::vector<std::uint8_t> occupied;
  std::vector<std::uint8_t> in_region;

  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) +
           static_cast<std::size_t>(ix);
  }
  Point2 cell_center(int ix, int iy) const {
    return {origin.x + (ix + 0.5) * resolution,
            origin.y + (iy + 0.5) * resolution};
  }
  std::size_t cells_in_region() const;
  std::size_t cells_with_count_at_least(int gamma) const;
  double region_area() const {
    return static_cast<double>(cells_in_region()) * resolution * resolution;
  }
};

struct GridOptions {
  // Restrict the region to y in [band_min, band_max] (e.g. the road strip).
  std::optional<std::pair<double, double>> y_band;
  // Skip the occupied mask when the caller only needs counts.
  bool compute_occupied = true;
};

// Per-cell count of collaborators that view the cell center.
CoverageGrid redundancy_grid(const EnvironmentSnapshot& env,
                             std::span<const std::int32_t> collaborators,
                             const RegionOfInterest& roi, double resolution,
                             const GridOptions& opts = {});

// Coverage set of one sensor (counts are 0/1). Throws when the id is unknown
// or the object carries no sensor mark.
CoverageGrid coverage_set(const EnvironmentSnapshot& env, std::int32_t sensor_id,
                          const RegionOfInterest& roi, double resolution);

// Area of the coverage set restricted to the ROI.
double coverage_area(const EnvironmentSnapshot& env, std::int32_t sensor_id,
                     const RegionOfInterest& roi, double resolution);

// Number of collaborators that view x, by direct line-of-sight tests.
int redundancy_at(const EnvironmentSnapshot& env,
                  std::span<const std::int32_t> collaborators, Point2 x);

struct GammaCoverage {
  double area = 0.0;
  double normalized = 0.0;
};

// Area inside the ROI covered by at least gamma collaborators, and the same
// normalized by the region area.
GammaCoverage gamma_coverage(const EnvironmentSnapshot& env,
                             std::span<const std::int32_t> collaborators,
                             const RegionOfInterest& roi, int gamma,
                             double resolution, const GridOptions& opts = {});

// Normalized gamma-coverage gain when RSUs contribute gamma_rsu of the
// required redundancy, evaluated on one realization:
// coverage at threshold (gamma - gamma_rsu) minus coverage at gamma.
double rsu_gamma_gain(const EnvironmentSnapshot& env,
                      std::span<const std::int32_t> collaborators,
                      const RegionOfInterest& roi, int gamma, int gamma_rsu,
                      double resolution, const GridOptions& opts = {});

}  // namespace covsim::sensing
