#include "covsim/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "covsim/experiment.hpp"

namespace covsim::montecarlo {

namespace {

constexpr double kPi = std::numbers::pi;

pointprocess::EnvironmentParams disc_params(const analytics::DiscModelParams& p,
                                            double p_s) {
  pointprocess::EnvironmentParams ep;
  ep.lambda = p.lambda;
  ep.p_s = p_s;
  ep.object_shape = geometry::Disc{p.r_obj};
  ep.sensor_offset = Point2{0.0, 0.0};
  ep.sensor_support = geometry::OmniSupport{p.r_sense};
  return ep;
}

Window centered_window(double half) {
  Window w;
  w.x_min = -half;
  w.x_max = half;
  w.y_min = -half;
  w.y_max = half;
  return w;
}

MeanSe reduce(const std::vector<double>& per_seed) {
  experiment::Accumulator acc;
  for (double v : per_seed) acc.add(v);
  return {acc.mean(), acc.se(), static_cast<int>(acc.n)};
}

}  // namespace

std::vector<std::int32_t> viewers_of(const EnvironmentSnapshot& env, Point2 x,
                                     double r_sense) {
  std::vector<std::int32_t> candidates;
  env.for_each_near(x, r_sense + env.max_circumradius() + 1.0,
                    [&](std::int32_t idx) { candidates.push_back(idx); });
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  std::vector<std::int32_t> viewers;
  for (std::int32_t idx : candidates) {
    const MarkedObject& o = env.objects()[static_cast<std::size_t>(idx)];
    const Point2 c = o.placed.center;
    if ((c - x).norm2() > r_sense * r_sense) continue;
    if (geometry::point_in_shape(x, o.placed) ||
        !sensing::segment_blocked(env, c, x, o.id)) {
      viewers.push_back(o.id);
    }
  }
  return viewers;
}

MeanSe coverage_area_mc(const analytics::DiscModelParams& p, int seeds,
                        double resolution, Seed seed, int jobs) {
  const double reach = p.r_sense + p.r_obj;
  const double half = reach + 1.0;
  const Window w = centered_window(half);
  const auto params = disc_params(p, 0.0);
  std::vector<double> areas(static_cast<std::size_t>(seeds), 0.0);
  std::vector<double> counts(static_cast<std::size_t>(seeds), 0.0);
  experiment::parallel_for(seeds, jobs, [&](std::int64_t i) {
    const Seed s{seed.root, seed.stream + 10 * static_cast<std::uint64_t>(i)};
    const auto env = pointprocess::sample_environment_with_reference(
        params, w, Point2{0.0, 0.0}, s);
    sensing::GridOptions opts;
    opts.compute_occupied = false;  // only the covered-cell count matters here
    const std::int32_t ids[1] = {0};
    const auto grid = sensing::redundancy_grid(
        env, ids, sensing::RoiDisc{Point2{0.0, 0.0}, p.r_sense}, resolution,
        opts);
    areas[static_cast<std::size_t>(i)] =
        static_cast<double>(grid.cells_with_count_at_least(1)) * resolution *
        resolution;
    // Obstacles close enough to matter, used as a control variate.
    int n_reach = 0;
    for (const auto& o : env.objects()) {
      if (o.id != 0 && o.placed.center.norm2() <= reach * reach) ++n_reach;
    }
    counts[static_cast<std::size_t>(i)] = n_reach;
  });

  // Control variate: the count of obstacles within sensing reach has known
  // mean lambda pi (R + r)^2 and is strongly correlated with the observed
  // area, so subtracting beta (N - E N) trims realization-level variance
  // without biasing the estimator.
  experiment::Accumulator a_acc, n_acc;
  for (std::size_t i = 0; i < areas.size(); ++i) {
    a_acc.add(areas[i]);
    n_acc.add(counts[i]);
  }
  const double mean_n = p.lambda * std::numbers::pi * reach * reach;
  double cov = 0.0, var_n = 0.0;
  for (std::size_t i = 0; i < areas.size(); ++i) {
    cov += (areas[i] - a_acc.mean()) * (counts[i] - n_acc.mean());
    var_n += (counts[i] - n_acc.mean()) * (counts[i] - n_acc.mean());
  }
  const double beta = var_n > 0.0 ? cov / var_n : 0.0;
  std::vector<double> adjusted(areas.size());
  for (std::size_t i = 0; i < areas.size(); ++i) {
    adjusted[i] = areas[i] - beta * (counts[i] - mean_n);
  }
  return reduce(adjusted);
}

std::vector<MeanSe> void_redundancy_mc(const analytics::DiscModelParams& p,
                                       std::vector<double> ps, int seeds,
                                       int points_per_seed, Seed seed,
                                       int jobs) {
  const double sample_half = 50.0;
  const double half = sample_half + p.r_sense + p.r_obj + 1.0;
  const Window w = centered_window(half);
  const auto params = disc_params(p, 0.0);

  std::vector<std::vector<double>> per_seed(
      ps.size(), std::vector<double>(static_cast<std::size_t>(seeds), 0.0));
  experiment::parallel_for(seeds, jobs, [&](std::int64_t i) {
    const Seed s{seed.root, seed.stream + 10 * static_cast<std::uint64_t>(i)};
    const auto env = pointprocess::sample_environment(params, w, s);
    Rng marks = make_rng(s, 1);
    std::vector<double> u(env.size());
    for (auto& v : u) v = marks.uniform();
    Rng rng = make_rng(s, 2);

    std::vector<std::int64_t> counts(ps.size(), 0);
    int collected = 0;
    int attempts = 0;
    const int max_attempts = points_per_seed * 200;
    while (collected < points_per_seed && attempts < max_attempts) {
      ++attempts;
      const Point2 x{rng.uniform(-sample_half, sample_half),
                     rng.uniform(-sample_half, sample_half)};
      bool occupied = false;
      env.for_each_near(x, 0.0, [&](std::int32_t idx) {
        if (!occupied &&
            geometry::point_in_shape(x, env.objects()[idx].placed)) {
          occupied = true;
        }
      });
      if (occupied) continue;
      const auto viewers = viewers_of(env, x, p.r_sense);
      for (std::size_t pi = 0; pi < ps.size(); ++pi) {
        std::int64_t c = 0;
        for (std::int32_t id : viewers) {
          if (u[static_cast<std::size_t>(id)] < ps[pi]) ++c;
        }
        counts[pi] += c;
      }
      ++collected;
    }
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
      per_seed[pi][static_cast<std::size_t>(i)] =
          collected > 0 ? static_cast<double>(counts[pi]) / collected : 0.0;
    }
  });

  std::vector<MeanSe> out;
  out.reserve(ps.size());
  for (const auto& v : per_seed) out.push_back(reduce(v));
  return out;
}

GammaMcGrid gamma_coverage_mc(const analytics::DiscModelParams& p,
                              const analytics::RoiSpec& roi,
                              std::vector<int> gammas, std::vector<double> ps,
                              int seeds, int points_per_seed, Seed seed,
                              int jobs) {
  const double r_int =
      std::visit([](const auto& r) { return r.r_interest; }, roi);
  const double strip_h =
      std::holds_alternative<analytics::RoiDiscStripSpec>(roi)
          ? std::get<analytics::RoiDiscStripSpec>(roi).strip_half_width
          : r_int;
  const double half = r_int + p.r_sense + p.r_obj + 1.0;
  const Window w = centered_window(half);
  const auto params = disc_params(p, 0.0);

  std::vector<std::vector<double>> per_seed(
      gammas.size() * ps.size(),
      std::vector<double>(static_cast<std::size_t>(seeds), 0.0));
  experiment::parallel_for(seeds, jobs, [&](std::int64_t i) {
    const Seed s{seed.root, seed.stream + 10 * static_cast<std::uint64_t>(i)};
    const auto env = pointprocess::sample_environment_with_reference(
        params, w, Point2{0.0, 0.0}, s);
    Rng marks = make_rng(s, 1);
    std::vector<double> u(env.size());
    for (auto& v : u) v = marks.uniform();
    u[0] = -1.0;  // the conditioned reference is always a sensor
    Rng rng = make_rng(s, 2);

    std::vector<std::int64_t> covered(gammas.size() * ps.size(), 0);
    for (int n = 0; n < points_per_seed; ++n) {
      Point2 x;
      do {
        const double rr = r_int * std::sqrt(rng.uniform());
        const double th = rng.uniform(0.0, 2.0 * kPi);
        x = {rr * std::cos(th), rr * std::sin(th)};
      } while (std::abs(x.y) > strip_h);
      const auto viewers = viewers_of(env, x, p.r_sense);
      for (std::size_t pi = 0; pi < ps.size(); ++pi) {
        int count = 0;
        for (std::int32_t id : viewers) {
          if (u[static_cast<std::size_t>(id)] < ps[pi]) ++count;
        }
        for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
          if (count >= gammas[gi]) ++covered[gi * ps.size() + pi];
        }
      }
    }
    for (std::size_t c = 0; c < covered.size(); ++c) {
      per_seed[c][static_cast<std::size_t>(i)] =
          static_cast<double>(covered[c]) / points_per_seed;
    }
  });

  GammaMcGrid grid;
  grid.gammas = std::move(gammas);
  grid.ps = std::move(ps);
  grid.cells.reserve(per_seed.size());
  for (const auto& v : per_seed) grid.cells.push_back(reduce(v));
  return grid;
}

}  // namespace covsim::montecarlo
