#include <stdexcept>
#include <algorithm>
#include <cmath>

#include "covsim/pointprocess.hpp"
#include "doctest.h"

using namespace covsim;
using namespace covsim::pointprocess;

namespace {

// Upper 1% chi-square critical value via the Wilson-Hilferty approximation.
double chi2_crit_99(int df) {
  const double z = 2.3263478740408408;
  const double a = 2.0 / (9.0 * df);
  const double t = 1.0 - a + z * std::sqrt(a);
  return df * t * t * t;
}

double uniformity_chi2(const std::vector<geometry::Point2>& pts, const Window& w,
                       int bins) {
  std::vector<int> counts(static_cast<std::size_t>(bins) * bins, 0);
  for (const auto& p : pts) {
    int bx = static_cast<int>((p.x - w.x_min) / w.width() * bins);
    int by = static_cast<int>((p.y - w.y_min) / w.height() * bins);
    bx = std::clamp(bx, 0, bins - 1);
    by = std::clamp(by, 0, bins - 1);
    ++counts[static_cast<std::size_t>(by) * bins + bx];
  }
  const double expected =
      static_cast<double>(pts.size()) / (static_cast<double>(bins) * bins);
  double chi2 = 0.0;
  for (int c : counts) {
    const double d = c - expected;
    chi2 += d * d / expected;
  }
  return chi2;
}

}  // namespace

TEST_SUITE("pointprocess") {

TEST_CASE("hppp basics") {
  Window w{0, 1000, 0, 24};
  CHECK(sample_hppp(0.0, w, Seed{1, 0}).empty());

  const auto a = sample_hppp(0.01, w, Seed{42, 7});
  const auto b = sample_hppp(0.01, w, Seed{42, 7});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].y == b[i].y);
  }
  for (const auto& p : a) CHECK(w.contains(p));
}

TEST_CASE("hppp count matches the Poisson mean and variance") {
  Window w{0, 1000, 0, 24};
  const double mean = 0.01 * w.area();  // 240
  const int n = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto pts = sample_hppp(0.01, w, Seed{555, static_cast<uint64_t>(i)});
    sum += static_cast<double>(pts.size());
    sum_sq += static_cast<double>(pts.size()) * pts.size();
  }
  const double m = sum / n;
  const double var = (sum_sq - n * m * m) / (n - 1);
  CHECK(std::abs(m - mean) <= 3.0 * std::sqrt(mean / n));
  // SE of the sample variance of a Poisson is roughly sigma^2 sqrt(2/(n-1)).
  CHECK(std::abs(var - mean) <= 3.0 * mean * std::sqrt(2.0 / (n - 1)));
}

TEST_CASE("thinning edge cases and the binomial rate") {
  Window w{0, 2000, 0, 50};
  const auto pts = sample_hppp(1.0, w, Seed{77, 0});
  REQUIRE(pts.size() > 90000);

  const auto all = thin(pts, 1.0, Seed{77, 1});
  CHECK(all.kept.size() == pts.size());
  CHECK(all.removed.empty());

  const auto none = thin(pts, 0.0, Seed{77, 2});
  CHECK(none.kept.empty());

  const auto some = thin(pts, 0.2, Seed{77, 3});
  const double rate = static_cast<double>(some.kept.size()) /
                      static_cast<double>(pts.size());
  CHECK(std::abs(rate - 0.2) <= 0.004);  // 3 sigma binomial bound at 1e5
  CHECK(some.kept.size() + some.removed.size() == pts.size());
}

TEST_CASE("thinned processes stay spatially uniform") {
  Window w{0, 500, 0, 500};
  const auto pts = sample_hppp(0.4, w, Seed{88, 0});
  const auto parts = thin(pts, 0.5, Seed{88, 1});
  const double crit = chi2_crit_99(10 * 10 - 1);
  CHECK(uniformity_chi2(parts.kept, w, 10) < crit);
  CHECK(uniformity_chi2(parts.removed, w, 10) < crit);
}

TEST_CASE("hard-core lane process: gaps, density, feasibility") {
  CHECK(sample_matern_lane(1e4, 10.0, 0.0, Seed{5, 0}).empty());
  CHECK_THROWS_WITH_AS(
      (void)sample_matern_lane(1e4, 10.0, 0.11, Seed{5, 0}),
      doctest::Contains("0.1"), std::invalid_argument);

  double total = 0.0;
  const int n_seeds = 100;
  for (int s = 0; s < n_seeds; ++s) {
    const auto pts =
        sample_matern_lane(1e4, 10.0, 0.05, Seed{5, static_cast<uint64_t>(s)});
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      CHECK(pts[i + 1] - pts[i] >= 10.0);
    }
    for (double x : pts) {
      CHECK(x >= 0.0);
      CHECK(x <= 1e4);
    }
    total += static_cast<double>(pts.size());
  }
  const double mean_count = total / n_seeds;
  CHECK(std::abs(mean_count - 500.0) <= 0.05 * 500.0);
}

TEST_CASE("hard-core density is matched across target levels") {
  for (double target : {0.01, 0.05, 0.09}) {
    double total = 0.0;
    const int n_seeds = 60;
    for (int s = 0; s < n_seeds; ++s) {
      total += static_cast<double>(
          sample_matern_lane(2e4, 10.0, target, Seed{6, static_cast<uint64_t>(s)})
              .size());
    }
    const double realized = total / n_seeds / 2e4;
    CHECK(std::abs(realized - target) <= 0.05 * target);
  }
}

TEST_CASE("displacement") {
  const std::vector<geometry::Point2> pts = {{0, 0}, {1, 2}};
  const std::vector<geometry::Vec2> vel = {{20, 0}, {-20, 0}};

  const auto still = displace(pts, vel, 0.0);
  CHECK(still[0].x == 0.0);
  CHECK(still[1].x == 1.0);

  const auto moved = displace(pts, vel, 1.5);
  CHECK(moved[0].x == doctest::Approx(30.0));
  CHECK(moved[1].x == doctest::Approx(-29.0));
  CHECK(moved[1].y == 2.0);

  const std::vector<geometry::Vec2> short_vel = {{1, 1}};
  CHECK_THROWS_AS((void)displace(pts, short_vel, 1.0), std::invalid_argument);
}

TEST_CASE("displaced process stays uniform (displacement theorem)") {
  Window w{0, 400, 0, 400};
  const auto pts = sample_hppp(0.5, w, Seed{91, 0});
  Rng rng = make_rng(Seed{91, 1});
  std::vector<geometry::Vec2> vel(pts.size());
  for (auto& v : vel) v = {rng.uniform(-20, 20), rng.uniform(-20, 20)};
  const auto moved = displace(pts, vel, 1.0);
  // Inspect the inner region unaffected by boundary outflow.
  Window inner{50, 350, 50, 350};
  std::vector<geometry::Point2> kept;
  for (const auto& p : moved) {
    if (inner.contains(p)) kept.push_back(p);
  }
  CHECK(uniformity_chi2(kept, inner, 10) < chi2_crit_99(99));
}

TEST_CASE("environment sampling validates and marks") {
  EnvironmentParams ep;
  ep.lambda = 0.01;
  ep.p_s = 0.3;
  Window w{-100, 100, -100, 100};
  const auto env = sample_environment(ep, w, Seed{101, 0});
  std::size_t sensors = 0;
  for (const auto& o : env.objects()) {
    if (o.is_sensor()) ++sensors;
  }
  CHECK(sensors > 0);
  CHECK(sensors < env.size());

  const auto with_ref = sample_environment_with_reference(ep, w, {0, 0},
                                                          Seed{101, 0});
  CHECK(with_ref.size() == env.size() + 1);
  REQUIRE(with_ref.find(0) != nullptr);
  CHECK(with_ref.find(0)->is_sensor());
  CHECK(with_ref.find(0)->placed.center.x == 0.0);
}

}  // TEST_SUITE
