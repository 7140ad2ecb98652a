#include "covsim/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "covsim/experiment.hpp"

namespace covsim::temporal {

namespace {

constexpr double kNeverSensed = -std::numeric_limits<double>::infinity();
constexpr double kRsuBodyRadius = 1e-3;

bool overlaps_disc(const PlacedShape& body, Point2 center, double radius) {
  return std::visit(
      [&](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, geometry::Disc>) {
          const double d = radius + v.radius;
          return (body.center - center).norm2() <= d * d;
        } else {
          // Closest point of the oriented box to the disc center.
          const Point2 rel = center - body.center;
          const double c = std::cos(-v.heading), s = std::sin(-v.heading);
          const double lx = c * rel.x - s * rel.y;
          const double ly = s * rel.x + c * rel.y;
          const double dx = std::max(std::abs(lx) - v.half_length, 0.0);
          const double dy = std::max(std::abs(ly) - v.half_width, 0.0);
          return dx * dx + dy * dy <= radius * radius;
        }
      },
      body.shape);
}

}  // namespace

void DynamicConfig::validate() const {
  base.validate();
  if (speed_s <= 0.0) throw std::invalid_argument("DynamicConfig: speed must be > 0");
  if (dt <= 0.0) throw std::invalid_argument("DynamicConfig: dt must be > 0");
  if (tau < 0.0) throw std::invalid_argument("DynamicConfig: tau must be >= 0");
  if (duration + 1e-12 < tau) {
    throw std::invalid_argument("DynamicConfig: duration must cover the tau warm-up");
  }
  if (r_vehicle <= 0.0 || r_interest <= 0.0 || r_communication <= 0.0) {
    throw std::invalid_argument("DynamicConfig: non-positive range");
  }
  if (object_boundary_samples < 4) {
    throw std::invalid_argument("DynamicConfig: need at least 4 boundary samples");
  }
}

std::vector<MarkedObject> place_rsus(const DynamicConfig& cfg) {
  if (!cfg.rsu) throw std::invalid_argument("place_rsus: no RSU config present");
  std::vector<MarkedObject> out;
  const double y = cfg.base.road_half_width() + cfg.rsu->setback;
  const int count =
      static_cast<int>(std::floor(cfg.base.road_length / cfg.rsu->spacing)) + 1;
  for (int k = 0; k < count; ++k) {
    MarkedObject o;
    o.id = k;
    o.placed = PlacedShape{Point2{k * cfg.rsu->spacing, y},
                           geometry::Disc{kRsuBodyRadius}};
    o.sensor = SensorMark{Point2{0.0, 0.0}, geometry::OmniSupport{cfg.rsu->r_rsu}};
    out.push_back(std::move(o));
  }
  return out;
}

DynamicSimulation::DynamicSimulation(const DynamicConfig& cfg, Seed seed)
    : cfg_(cfg) {
  cfg_.validate();
  // Vehicle supports in the dynamic model use r_vehicle.
  freeway::FreewayConfig road = cfg_.base;
  road.sensing_radius = cfg_.r_vehicle;
  const auto real = freeway::generate_freeway(road, seed);

  const auto& objs = real.env.objects();
  n_vehicles_ = static_cast<int>(objs.size());
  entities_.reserve(objs.size());
  for (std::size_t i = 0; i < objs.size(); ++i) {
    Entity e;
    e.base_pos = objs[i].placed.center;
    e.direction = real.direction[i];
    e.velocity = Vec2{cfg_.speed_s * e.direction, 0.0};
    e.sensor = objs[i].is_sensor();
    e.r_sense = cfg_.r_vehicle;
    entities_.push_back(e);
  }
  if (cfg_.rsu) {
    for (const auto& rsu : place_rsus(cfg_)) {
      Entity e;
      e.base_pos = rsu.placed.center;
      e.velocity = Vec2{0.0, 0.0};
      e.direction = 0;
      e.sensor = true;
      e.is_rsu = true;
      e.elevated = cfg_.rsu->elevated;
      e.r_sense = cfg_.rsu->r_rsu;
      entities_.push_back(e);
      ++n_rsus_;
    }
  }

  sensor_slot_.assign(entities_.size(), -1);
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    if (entities_[i].sensor) {
      sensor_slot_[i] = static_cast<int>(sensor_entities_.size());
      sensor_entities_.push_back(static_cast<std::int32_t>(i));
    }
  }
  last_sensed_.assign(sensor_entities_.size() *
                          static_cast<std::size_t>(n_vehicles_),
                      kNeverSensed);

  const geometry::PlacedShape proto{
      Point2{0.0, 0.0},
      geometry::Rect{0.5 * cfg_.base.vehicle_length, 0.5 * cfg_.base.vehicle_width,
                     0.0}};
  vehicle_local_samples_ =
      geometry::boundary_samples(proto, cfg_.object_boundary_samples);
  object_circumradius_ = geometry::shape_circumradius(proto.shape);

  rebuild_frame();
  refresh_tracks();
}

void DynamicSimulation::rebuild_frame() {
  pos_.resize(entities_.size());
  std::vector<MarkedObject> objs;
  objs.reserve(entities_.size());
  const double drift = cfg_.speed_s * cfg_.duration + 1.0;
  Window w;
  w.x_min = -drift;
  w.x_max = cfg_.base.road_length + drift;
  w.y_min = -cfg_.base.road_half_width() - 1.0;
  w.y_max = cfg_.base.road_half_width() +
            (cfg_.rsu ? cfg_.rsu->setback + 1.0 : 1.0);
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    const Entity& e = entities_[i];
    pos_[i] = e.base_pos + e.velocity * t_;
    MarkedObject o;
    o.id = static_cast<std::int32_t>(i);
    if (e.is_rsu) {
      o.placed = PlacedShape{pos_[i], geometry::Disc{kRsuBodyRadius}};
    } else {
      o.placed = PlacedShape{
          pos_[i], geometry::Rect{0.5 * cfg_.base.vehicle_length,
                                  0.5 * cfg_.base.vehicle_width, 0.0}};
    }
    if (e.sensor) {
      o.sensor = SensorMark{Point2{0.0, 0.0}, geometry::OmniSupport{e.r_sense}};
    }
    objs.push_back(std::move(o));
  }
  env_ = EnvironmentSnapshot(std::move(objs), w);
}

bool DynamicSimulation::object_sensed(std::int32_t sensor_id,
                                      std::int32_t object_id) const {
  const Entity& s = entities_[static_cast<std::size_t>(sensor_id)];
  if (!s.sensor) return false;
  if (sensor_id == object_id) return true;  // self-awareness
  const Point2 spos = pos_[static_cast<std::size_t>(sensor_id)];
  const Point2 opos = pos_[static_cast<std::size_t>(object_id)];
  const double reach = s.r_sense + object_circumradius_ + geometry::kGeomEps;
  if ((opos - spos).norm2() > reach * reach) return false;
  for (const Point2& local : vehicle_local_samples_) {
    const Point2 p = opos + local;
    if ((p - spos).norm2() > s.r_sense * s.r_sense) continue;
    if (s.elevated) return true;
    if (!sensing::segment_blocked(env_, spos, p, sensor_id, object_id)) {
      return true;
    }
  }
  return false;
}

void DynamicSimulation::refresh_tracks() {
  std::vector<std::int32_t> nearby;
  for (std::size_t slot = 0; slot < sensor_entities_.size(); ++slot) {
    const std::int32_t j = sensor_entities_[slot];
    const Entity& s = entities_[static_cast<std::size_t>(j)];
    const Point2 spos = pos_[static_cast<std::size_t>(j)];
    const double reach = s.r_sense + object_circumradius_ + 1.0;
    nearby.clear();
    env_.for_each_near(spos, reach, [&](std::int32_t k) {
      if (k < n_vehicles_) nearby.push_back(k);
    });
    std::sort(nearby.begin(), nearby.end());
    nearby.erase(std::unique(nearby.begin(), nearby.end()), nearby.end());
    double* row = &last_sensed_[slot * static_cast<std::size_t>(n_vehicles_)];
    for (std::int32_t k : nearby) {
      if (object_sensed(j, k)) row[k] = t_;
    }
  }
}

void DynamicSimulation::step() {
  t_ += cfg_.dt;
  ++frame_;
  rebuild_frame();
  refresh_tracks();
}

Point2 DynamicSimulation::position(std::int32_t entity_id) const {
  return pos_[static_cast<std::size_t>(entity_id)];
}

bool DynamicSimulation::is_sensing_vehicle(std::int32_t entity_id) const {
  const Entity& e = entities_[static_cast<std::size_t>(entity_id)];
  return e.sensor && !e.is_rsu;
}

std::vector<std::int32_t> DynamicSimulation::reference_ids(int direction) const {
  // Guarded stretch: far enough from the road ends that every collaborator
  // able to see an object of interest is inside the window.
  double reach = cfg_.r_vehicle;
  if (cfg_.rsu) reach = std::max(reach, cfg_.rsu->r_rsu);
  const double margin = cfg_.r_interest + reach;
  const double x_lo = margin;
  const double x_hi = cfg_.base.road_length - margin;
  std::vector<std::int32_t> out;
  for (int i = 0; i < n_vehicles_; ++i) {
    const Entity& e = entities_[static_cast<std::size_t>(i)];
    if (!e.sensor) continue;
    if (direction != 0 && e.direction != direction) continue;
    const double x = pos_[static_cast<std::size_t>(i)].x;
    if (x < x_lo || x > x_hi) continue;
    out.push_back(i);
  }
  return out;
}

std::vector<std::int32_t> DynamicSimulation::objects_of_interest(
    std::int32_t ref_id) const {
  const Point2 c = pos_[static_cast<std::size_t>(ref_id)];
  std::vector<std::int32_t> out;
  env_.for_each_near(c, cfg_.r_interest + object_circumradius_ + 1.0,
                     [&](std::int32_t k) {
                       if (k >= n_vehicles_ || k == ref_id) return;
                       out.push_back(k);
                     });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::vector<std::int32_t> overlapping;
  for (std::int32_t k : out) {
    if (overlaps_disc(env_.objects()[static_cast<std::size_t>(k)].placed, c,
                      cfg_.r_interest)) {
      overlapping.push_back(k);
    }
  }
  return overlapping;
}

bool DynamicSimulation::collaborator_eligible(const Entity& ref, Point2 ref_pos,
                                              std::int32_t j,
                                              Scheme scheme) const {
  const Entity& e = entities_[static_cast<std::size_t>(j)];
  if (e.is_rsu) {
    if (scheme != Scheme::rsu && scheme != Scheme::rsu_and_opposite) return false;
  } else if (e.direction != ref.direction) {
    if (scheme != Scheme::opposite && scheme != Scheme::rsu_and_opposite) {
      return false;
    }
  }
  const Point2 jpos = pos_[static_cast<std::size_t>(j)];
  return (jpos - ref_pos).norm2() <=
         cfg_.r_communication * cfg_.r_communication;
}

int DynamicSimulation::object_redundancy(std::int32_t ref_id,
                                         std::int32_t object_id, Scheme scheme,
                                         double tau) const {
  const Entity& ref = entities_[static_cast<std::size_t>(ref_id)];
  const Point2 ref_pos = pos_[static_cast<std::size_t>(ref_id)];
  const double cutoff = t_ - tau - 1e-12;
  int count = 0;
  for (std::size_t slot = 0; slot < sensor_entities_.size(); ++slot) {
    const std::int32_t j = sensor_entities_[slot];
    if (!collaborator_eligible(ref, ref_pos, j, scheme)) continue;
    const double last =
        last_sensed_[slot * static_cast<std::size_t>(n_vehicles_) +
                     static_cast<std::size_t>(object_id)];
    // never-sensed entries stay at -infinity and must not match an
    // infinite-tau window
    if (last != kNeverSensed && last >= cutoff) ++count;
  }
  return count;
}

std::optional<double> DynamicSimulation::object_coverage(std::int32_t ref_id,
                                                         Scheme scheme,
                                                         int gamma,
                                                         double tau) const {
  if (gamma < 1) throw std::invalid_argument("object_coverage: gamma must be >= 1");
  const auto objects = objects_of_interest(ref_id);
  if (objects.empty()) return std::nullopt;
  int covered = 0;
  for (std::int32_t k : objects) {
    if (object_redundancy(ref_id, k, scheme, tau) >= gamma) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(objects.size());
}

std::optional<double> DynamicSimulation::mean_object_coverage(
    Scheme scheme, int gamma, double tau, int direction) const {
  const auto refs = reference_ids(direction);
  experiment::Accumulator acc;
  for (std::int32_t r : refs) {
    if (const auto c = object_coverage(r, scheme, gamma, tau)) acc.add(*c);
  }
  if (acc.n == 0) return std::nullopt;
  return acc.mean();
}

std::vector<SeriesPoint> simulate(const DynamicConfig& cfg, int gamma, Seed seed) {
  DynamicSimulation sim(cfg, seed);
  std::vector<SeriesPoint> series;
  const int n_steps = static_cast<int>(std::llround(cfg.duration / cfg.dt));
  for (int k = 0; k <= n_steps; ++k) {
    if (k > 0) sim.step();
    if (sim.time() + 1e-9 < cfg.tau) continue;  // warm-up discarded
    SeriesPoint pt;
    pt.t = sim.time();
    pt.nearby = sim.mean_object_coverage(cfg.scheme, gamma, cfg.tau, +1);
    pt.opposite = sim.mean_object_coverage(cfg.scheme, gamma, cfg.tau, -1);
    series.push_back(pt);
  }
  return series;
}

TemporalSweep temporal_sweep_mc(const DynamicConfig& cfg,
                                std::vector<Scheme> schemes,
                                std::vector<double> taus, int gamma, int seeds,
                                Seed seed, int jobs) {
  double max_tau = 0.0;
  for (double t : taus) max_tau = std::max(max_tau, t);
  DynamicConfig run_cfg = cfg;
  run_cfg.tau = max_tau;
  if (run_cfg.duration < max_tau) run_cfg.duration = max_tau + 1.0;
  run_cfg.validate();

  const std::size_t n_cells = schemes.size() * taus.size() * 2;
  std::vector<std::vector<std::optional<double>>> per_seed(
      n_cells,
      std::vector<std::optional<double>>(static_cast<std::size_t>(seeds)));
  experiment::parallel_for(seeds, jobs, [&](std::int64_t i) {
    const Seed s{seed.root, seed.stream + 7000 + static_cast<std::uint64_t>(i)};
    DynamicSimulation sim(run_cfg, s);
    const int n_steps =
        static_cast<int>(std::llround(run_cfg.duration / run_cfg.dt));
    std::vector<experiment::Accumulator> acc(n_cells);
    for (int k = 0; k <= n_steps; ++k) {
      if (k > 0) sim.step();
      if (sim.time() + 1e-9 < max_tau) continue;
      for (std::size_t si = 0; si < schemes.size(); ++si) {
        for (std::size_t ti = 0; ti < taus.size(); ++ti) {
          for (int d = 0; d < 2; ++d) {
            const int direction = d == 0 ? +1 : -1;
            if (const auto c = sim.mean_object_coverage(schemes[si], gamma,
                                                        taus[ti], direction)) {
              acc[(si * taus.size() + ti) * 2 + d].add(*c);
            }
          }
        }
      }
    }
    for (std::size_t c = 0; c < n_cells; ++c) {
      if (acc[c].n > 0) per_seed[c][static_cast<std::size_t>(i)] = acc[c].mean();
    }
  });

  TemporalSweep out;
  out.schemes = std::move(schemes);
  out.taus = std::move(taus);
  out.stats.resize(n_cells);
  for (std::size_t c = 0; c < n_cells; ++c) {
    experiment::Accumulator acc;
    for (const auto& v : per_seed[c]) {
      if (v) acc.add(*v);
    }
    out.stats[c] = {acc.mean(), acc.se(), static_cast<int>(acc.n)};
  }
  return out;
}

TemporalStat temporal_coverage_mc(const DynamicConfig& cfg, int gamma,
                                  int direction, int seeds, Seed seed,
                                  int jobs) {
  std::vector<std::optional<double>> per_seed(static_cast<std::size_t>(seeds));
  experiment::parallel_for(seeds, jobs, [&](std::int64_t i) {
    const Seed s{seed.root, seed.stream + 7000 + static_cast<std::uint64_t>(i)};
    DynamicSimulation sim(cfg, s);
    const int n_steps = static_cast<int>(std::llround(cfg.duration / cfg.dt));
    experiment::Accumulator acc;
    for (int k = 0; k <= n_steps; ++k) {
      if (k > 0) sim.step();
      if (sim.time() + 1e-9 < cfg.tau) continue;
      if (const auto c =
              sim.mean_object_coverage(cfg.scheme, gamma, cfg.tau, direction)) {
        acc.add(*c);
      }
    }
    if (acc.n > 0) per_seed[static_cast<std::size_t>(i)] = acc.mean();
  });
  experiment::Accumulator acc;
  for (const auto& v : per_seed) {
    if (v) acc.add(*v);
  }
  return {acc.mean(), acc.se(), static_cast<int>(acc.n)};
}

}  // namespace covsim::temporal
