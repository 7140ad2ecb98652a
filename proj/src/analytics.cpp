#include "covsim/analytics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace covsim::analytics {

namespace {

constexpr double kPi = std::numbers::pi;

double disc_band_area(double r, double h) {
  if (r <= 0.0) return 0.0;
  if (h >= r) return kPi * r * r;
  if (h <= 0.0) return 0.0;
  return 2.0 * (h * std::sqrt(r * r - h * h) + r * r * std::asin(h / r));
}

// integral of rho * exp(-a rho) d rho over [u1, u2] via the antiderivative
// -(rho/a + 1/a^2) exp(-a rho); the a == 0 limit is (u2^2 - u1^2)/2.
double radial_void_integral(double a, double u1, double u2) {
  if (u2 <= u1) return 0.0;
  if (a == 0.0) return 0.5 * (u2 * u2 - u1 * u1);
  auto g = [a](double u) { return (u / a + 1.0 / (a * a)) * std::exp(-a * u); };
  return g(u1) - g(u2);
}

struct VoidTermInputs {
  double a;            // 2 lambda r_obj
  double log_hole;     // -lambda pi r_obj^2
  double lower;        // radial start: sensor-object radius
};

VoidTermInputs void_inputs(const DiscModelParams& p) {
  return {2.0 * p.lambda * p.r_obj, -p.lambda * kPi * p.r_obj * p.r_obj,
          p.sensor_shape_radius()};
}

// E[|C0 \ A0|] truncated at radial distance up to r_cut.
double void_area_disc(const DiscModelParams& p, double r_cut) {
  const VoidTermInputs in = void_inputs(p);
  const double hi = std::min(p.r_sense, r_cut);
  return 2.0 * kPi * std::exp(in.log_hole) *
         radial_void_integral(in.a, in.lower, hi);
}

// E[|D0 cap C0 minus A0|] for the strip-clipped ROI, by angular quadrature of the
// radial closed form. Composite Simpson on each smooth piece of
// rho_max(theta) = min(R, r_int, h / sin theta).
double void_area_strip(const DiscModelParams& p, double r_int, double h) {
  const VoidTermInputs in = void_inputs(p);
  if (in.lower > h) {
    throw std::invalid_argument(
        "gamma_coverage_approx: sensor-object radius exceeds the strip half width");
  }
  const double cap = std::min(p.r_sense, r_int);
  if (cap <= in.lower) return 0.0;
  auto f = [&](double theta) {
    const double s = std::sin(theta);
    double rho_max = cap;
    if (s * cap > h) rho_max = h / s;
    return radial_void_integral(in.a, in.lower, rho_max);
  };
  auto simpson = [&](double lo, double hi, int n) {
    // n even panels
    const double step = (hi - lo) / n;
    double sum = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) sum += f(lo + i * step) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * step / 3.0;
  };
  // Quarter symmetry; split at the kink where the strip starts clipping.
  const double theta_c = h >= cap ? 0.5 * kPi : std::asin(h / cap);
  double integral = 0.0;
  if (theta_c > 0.0) integral += simpson(0.0, theta_c, 512);
  if (theta_c < 0.5 * kPi) integral += simpson(theta_c, 0.5 * kPi, 2048);
  return 4.0 * integral * std::exp(in.log_hole);
}

}  // namespace

double roi_spec_area(const RoiSpec& roi) {
  return std::visit(
      [](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, RoiDiscStripSpec>) {
          return disc_band_area(r.r_interest, r.strip_half_width);
        } else {
          return kPi * r.r_interest * r.r_interest;
        }
      },
      roi);
}

CoverageAreaTerms expected_coverage_area(const DiscModelParams& p) {
  if (p.lambda < 0.0 || p.r_obj < 0.0 || p.r_sense < 0.0) {
    throw std::invalid_argument("expected_coverage_area: negative parameter");
  }
  CoverageAreaTerms out;
  const double r_self = std::min(p.r_sense, p.sensor_shape_radius());
  out.self_term = kPi * r_self * r_self;
  out.void_term = void_area_disc(p, p.r_sense);
  out.total = out.self_term + out.void_term;
  return out;
}

double expected_void_redundancy(const DiscModelParams& p) {
  const double void_area = expected_coverage_area(p).void_term;
  const double hole = std::exp(-p.lambda * kPi * p.r_obj * p.r_obj);
  return p.p_s * p.lambda * void_area / hole;
}

double poisson_tail(int k, double m) {
  if (m < 0.0) throw std::invalid_argument("poisson_tail: negative mean");
  if (k <= 0) return 1.0;
  // P(N < k) summed in log space so large means underflow cleanly to a tail
  // of exactly 1.
  double cdf = 0.0;
  const double log_m = m > 0.0 ? std::log(m) : 0.0;
  double log_term = -m;  // log of e^{-m} m^0 / 0!
  for (int i = 0; i < k; ++i) {
    if (i > 0) {
      if (m == 0.0) break;
      log_term += log_m - std::log(static_cast<double>(i));
    }
    cdf += std::exp(log_term);
  }
  if (cdf > 1.0) cdf = 1.0;
  return 1.0 - cdf;
}

GammaApprox gamma_coverage_approx(const DiscModelParams& p, const RoiSpec& roi,
                                  int gamma) {
  if (gamma < 1) {
    throw std::invalid_argument("gamma_coverage_approx: gamma must be >= 1");
  }
  const double r_a = p.sensor_shape_radius();
  const double r_int = std::visit([](const auto& r) { return r.r_interest; }, roi);

  GammaApprox out;
  ApproxTerms& t = out.terms;
  t.roi_area = roi_spec_area(roi);
  t.ea_s = kPi * std::pow(std::min(p.r_sense, r_a), 2);
  t.r_bar_void = expected_void_redundancy(p);

  const double r_self = std::min({p.r_sense, r_a, r_int});
  if (std::holds_alternative<RoiDiscStripSpec>(roi)) {
    const auto& strip = std::get<RoiDiscStripSpec>(roi);
    t.ed_c_a = disc_band_area(r_self, strip.strip_half_width);
    t.ed_c_not_a = void_area_strip(p, r_int, strip.strip_half_width);
    t.ed_not_a = t.roi_area - disc_band_area(std::min(r_a, r_int),
                                             strip.strip_half_width);
  } else {
    t.ed_c_a = kPi * r_self * r_self;
    t.ed_c_not_a = void_area_disc(p, r_int);
    t.ed_not_a = t.roi_area - kPi * std::pow(std::min(r_a, r_int), 2);
  }

  const double lambda_s = p.p_s * p.lambda;
  const double hole = std::exp(-p.lambda * kPi * p.r_obj * p.r_obj);
  const double value =
      t.ed_c_a * poisson_tail(gamma - 1, lambda_s * t.ea_s) +
      t.ed_c_not_a * poisson_tail(gamma - 1, t.r_bar_void) +
      t.ed_not_a * poisson_tail(gamma, lambda_s * t.ea_s) +
      (t.ed_not_a * hole - t.ed_c_not_a) * poisson_tail(gamma, t.r_bar_void);
  out.normalized = value / t.roi_area;
  return out;
}

std::vector<std::pair<double, double>> coverage_vs_obstruction(
    const DiscModelParams& base, double lambda_s_fixed,
    std::span<const double> lambda_totals, const RoiSpec& roi, int gamma) {
  std::vector<std::pair<double, double>> out;
  out.reserve(lambda_totals.size());
  for (double lambda_total : lambda_totals) {
    if (lambda_total < lambda_s_fixed) {
      throw std::invalid_argument(
          "coverage_vs_obstruction: lambda_total below the fixed sensor density");
    }
    DiscModelParams p = base;
    p.lambda = lambda_total;
    p.p_s = lambda_total > 0.0 ? lambda_s_fixed / lambda_total : 0.0;
    out.emplace_back(lambda_total - lambda_s_fixed,
                     gamma_coverage_approx(p, roi, gamma).normalized);
  }
  return out;
}

}  // namespace covsim::analytics
