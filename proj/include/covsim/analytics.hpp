#pragma once

#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace covsim::analytics {

// Disc specialization of the environment model: objects are discs of radius
// r_obj, sensors sit at the object center (zero offset) with an omni support
// of radius r_sense. A separate radius for sensor-carrying objects is accepted
// (r_obj_sensor < 0 means "same as r_obj").
struct DiscModelParams {
  double lambda = 0.0;
  double p_s = 1.0;
  double r_obj = 1.67;
  double r_sense = 100.0;
  double r_obj_sensor = -1.0;

  double sensor_shape_radius() const {
    return r_obj_sensor < 0.0 ? r_obj : r_obj_sensor;
  }
};

struct RoiDiscSpec {
  double r_interest = 100.0;
};
struct RoiDiscStripSpec {
  double r_interest = 100.0;
  double strip_half_width = 12.0;
};
using RoiSpec = std::variant<RoiDiscSpec, RoiDiscStripSpec>;

double roi_spec_area(const RoiSpec& roi);

struct CoverageAreaTerms {
  double total = 0.0;
  double self_term = 0.0;  // |b(0, min(R, r))|
  double void_term = 0.0;  // expected visible void area
};

// Expected coverage area of a typical sensor. The void term
//   integral over r < |x| <= R of exp(-lambda (pi r^2 + 2 r |x|)) dx
// is evaluated with the closed-form antiderivative of rho * exp(-a rho).
CoverageAreaTerms expected_coverage_area(const DiscModelParams& p);

// Expected redundancy of a typical void-space location when all sensors
// collaborate: p_s * lambda * E[|C0 \ A0|] / exp(-lambda E[|A|]).
double expected_void_redundancy(const DiscModelParams& p);

// Upper tail P(N(m) >= k) of a Poisson variable with mean m.
double poisson_tail(int k, double m);

struct ApproxTerms {
  double ed_c_a = 0.0;      // E[|D0 cap C0 cap A0|]
  double ed_c_not_a = 0.0;  // E[|D0 cap C0 minus A0|]
  double ed_not_a = 0.0;    // E[|D0 \ A0|]
  // E[|A^s|], the mean sensed area inside a sensing object's own body, taken
  // as pi * min(r_sense, r_obj_sensor)^2; ambiguous when r_sense < r_obj.
  double ea_s = 0.0;
  double r_bar_void = 0.0;  // unconditioned expected void redundancy
  double roi_area = 0.0;
};

struct GammaApprox {
  double normalized = 0.0;
  ApproxTerms terms;
};

// Poisson-tail approximation of the expected normalized gamma-coverage:
//   ed_c_a     * Q(gamma-1, lambda_s ea_s)
// + ed_c_not_a * Q(gamma-1, r_bar_void)
// + ed_not_a   * Q(gamma,   lambda_s ea_s)
// + (ed_not_a e^{-lambda E|A|} - ed_c_not_a) * Q(gamma, r_bar_void),
// all divided by |D0|. C0-dependent areas are truncated to the ROI: radially
// for a disc ROI, by angular quadrature for a strip-clipped ROI.
GammaApprox gamma_coverage_approx(const DiscModelParams& p, const RoiSpec& roi,
                                  int gamma);

// gamma_coverage_approx evaluated along an obstruction sweep with the sensor
// density held fixed: p_s = lambda_s_fixed / lambda_total. The radii are taken
// from `base`; its lambda and p_s fields are ignored. Returns pairs of
// (obstruction density lambda_total - lambda_s_fixed, normalized coverage).
std::vector<std::pair<double, double>> coverage_vs_obstruction(
    const DiscModelParams& base, double lambda_s_fixed,
    std::span<const double> lambda_totals, const RoiSpec& roi, int gamma);

}  // namespace covsim::analytics
