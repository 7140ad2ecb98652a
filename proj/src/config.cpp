#include "covsim/config.hpp"

#include <algorithm>
#include <fstream>

namespace covsim::config {

StrictObject::StrictObject(const json& j, std::string context)
    : j_(j), context_(std::move(context)) {
  if (!j_.is_object()) {
    throw ConfigError(context_ + ": expected a JSON object");
  }
}

json StrictObject::child(const char* key) {
  mark(key);
  if (!j_.contains(key)) return json::object();
  if (!j_.at(key).is_object()) {
    throw ConfigError(context_ + "." + key + ": expected a JSON object");
  }
  return j_.at(key);
}

void StrictObject::finish() const {
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end()) {
      throw ConfigError(context_ + ": unknown key \"" + it.key() + "\"");
    }
  }
}

json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json Common::to_json() const {
  return json{{"seed", json{{"root", seed.root}, {"stream", seed.stream}}},
              {"seeds", seeds},
              {"trials", trials},
              {"jobs", jobs},
              {"resolution", resolution},
              {"out", out}};
}

Common parse_common(StrictObject& obj) {
  Common c;
  const json seed_j = obj.child("seed");
  {
    StrictObject s(seed_j, "seed");
    s.get("root", c.seed.root);
    s.get("stream", c.seed.stream);
    s.finish();
  }
  obj.get("seeds", c.seeds);
  obj.get("trials", c.trials);
  obj.get("jobs", c.jobs);
  obj.get("resolution", c.resolution);
  obj.get("out", c.out);
  return c;
}

freeway::FreewayConfig parse_freeway(const json& j, const std::string& ctx,
                                     freeway::FreewayConfig base) {
  freeway::FreewayConfig cfg = base;
  StrictObject o(j, ctx);
  o.get("lanes_per_direction", cfg.lanes_per_direction);
  o.get("lane_width", cfg.lane_width);
  o.get("vehicle_length", cfg.vehicle_length);
  o.get("vehicle_width", cfg.vehicle_width);
  o.get("min_gap", cfg.min_gap);
  o.get("lateral_offset_halfwidth", cfg.lateral_offset_halfwidth);
  o.get("road_length", cfg.road_length);
  o.get("target_density", cfg.target_density);
  o.get("p_s", cfg.p_s);
  o.get("sensing_radius", cfg.sensing_radius);
  o.get("roi_strip_halfwidth", cfg.roi_strip_halfwidth);
  o.get("guard_length", cfg.guard_length);
  o.get("resolution", cfg.resolution);
  o.finish();
  return cfg;
}

json freeway_to_json(const freeway::FreewayConfig& cfg) {
  return json{{"lanes_per_direction", cfg.lanes_per_direction},
              {"lane_width", cfg.lane_width},
              {"vehicle_length", cfg.vehicle_length},
              {"vehicle_width", cfg.vehicle_width},
              {"min_gap", cfg.min_gap},
              {"lateral_offset_halfwidth", cfg.lateral_offset_halfwidth},
              {"road_length", cfg.road_length},
              {"target_density", cfg.target_density},
              {"p_s", cfg.p_s},
              {"sensing_radius", cfg.sensing_radius},
              {"roi_strip_halfwidth", cfg.roi_strip_halfwidth},
              {"guard_length", cfg.guard_length},
              {"resolution", cfg.resolution}};
}

analytics::DiscModelParams parse_disc_model(const json& j, const std::string& ctx,
                                            analytics::DiscModelParams base) {
  analytics::DiscModelParams p = base;
  StrictObject o(j, ctx);
  o.get("lambda", p.lambda);
  o.get("p_s", p.p_s);
  o.get("r_obj", p.r_obj);
  o.get("r_sense", p.r_sense);
  o.get("r_obj_sensor", p.r_obj_sensor);
  o.finish();
  return p;
}

json disc_model_to_json(const analytics::DiscModelParams& p) {
  return json{{"lambda", p.lambda},
              {"p_s", p.p_s},
              {"r_obj", p.r_obj},
              {"r_sense", p.r_sense},
              {"r_obj_sensor", p.r_obj_sensor}};
}

analytics::RoiSpec parse_roi(const json& j, const std::string& ctx,
                             const analytics::RoiSpec& fallback) {
  if (j.empty()) return fallback;
  StrictObject o(j, ctx);
  std::string shape = "disc";
  double r_interest = 100.0;
  double strip = 12.0;
  o.get("shape", shape);
  o.get("r_interest", r_interest);
  o.get("strip_half_width", strip);
  o.finish();
  if (shape == "disc") return analytics::RoiDiscSpec{r_interest};
  if (shape == "disc_strip") return analytics::RoiDiscStripSpec{r_interest, strip};
  throw ConfigError(ctx + ".shape: expected \"disc\" or \"disc_strip\"");
}

json roi_to_json(const analytics::RoiSpec& roi) {
  if (const auto* d = std::get_if<analytics::RoiDiscSpec>(&roi)) {
    return json{{"shape", "disc"}, {"r_interest", d->r_interest}};
  }
  const auto& s = std::get<analytics::RoiDiscStripSpec>(roi);
  return json{{"shape", "disc_strip"},
              {"r_interest", s.r_interest},
              {"strip_half_width", s.strip_half_width}};
}

v2i::LaneParams parse_lane(const json& j, const std::string& ctx) {
  v2i::LaneParams p;
  StrictObject o(j, ctx);
  o.get("eta", p.eta);
  o.get("p_s", p.p_s);
  o.get("speed_s", p.speed_s);
  o.get("t_gap", p.t_gap);
  bool explicit_interest = o.has("t_interest");
  o.get("t_interest", p.t_interest);
  o.get("segment_d", p.segment_d);
  o.get("nu", p.nu);
  o.finish();
  if (!explicit_interest) p.t_interest = p.eta * p.t_gap;
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(ctx + ": " + e.what());
  }
  return p;
}

json lane_to_json(const v2i::LaneParams& p) {
  return json{{"eta", p.eta},         {"p_s", p.p_s},
              {"speed_s", p.speed_s}, {"t_gap", p.t_gap},
              {"t_interest", p.t_interest}, {"segment_d", p.segment_d},
              {"nu", p.nu}};
}

temporal::Scheme parse_scheme(const std::string& name) {
  if (name == "base") return temporal::Scheme::base;
  if (name == "rsu") return temporal::Scheme::rsu;
  if (name == "opposite") return temporal::Scheme::opposite;
  if (name == "rsu_and_opposite") return temporal::Scheme::rsu_and_opposite;
  throw ConfigError("unknown scheme \"" + name + "\"");
}

std::string scheme_name(temporal::Scheme s) {
  switch (s) {
    case temporal::Scheme::base:
      return "base";
    case temporal::Scheme::rsu:
      return "rsu";
    case temporal::Scheme::opposite:
      return "opposite";
    case temporal::Scheme::rsu_and_opposite:
      return "rsu_and_opposite";
  }
  return "?";
}

temporal::DynamicConfig parse_dynamic(const json& j, const std::string& ctx) {
  temporal::DynamicConfig cfg;
  // Temporal defaults follow the dynamic scenario, not the static freeway.
  cfg.base.road_length = 2400.0;
  cfg.base.target_density = 0.01;
  cfg.base.p_s = 0.1;
  cfg.rsu = temporal::RsuConfig{};

  StrictObject o(j, ctx);
  cfg.base = parse_freeway(o.child("freeway"), ctx + ".freeway", cfg.base);
  o.get("speed_s", cfg.speed_s);
  {
    const json rj = o.child("rsu");
    if (!rj.empty()) {
      StrictObject r(rj, ctx + ".rsu");
      bool enabled = true;
      r.get("enabled", enabled);
      temporal::RsuConfig rsu = cfg.rsu.value_or(temporal::RsuConfig{});
      r.get("spacing", rsu.spacing);
      r.get("setback", rsu.setback);
      r.get("r_rsu", rsu.r_rsu);
      r.get("elevated", rsu.elevated);
      r.finish();
      if (enabled) {
        cfg.rsu = rsu;
      } else {
        cfg.rsu.reset();
      }
    }
  }
  o.get("r_vehicle", cfg.r_vehicle);
  o.get("r_communication", cfg.r_communication);
  o.get("r_interest", cfg.r_interest);
  o.get("tau", cfg.tau);
  {
    std::string s = scheme_name(cfg.scheme);
    o.get("scheme", s);
    cfg.scheme = parse_scheme(s);
  }
  o.get("dt", cfg.dt);
  o.get("duration", cfg.duration);
  o.get("object_boundary_samples", cfg.object_boundary_samples);
  o.finish();
  return cfg;
}

json dynamic_to_json(const temporal::DynamicConfig& cfg) {
  json rsu;
  if (cfg.rsu) {
    rsu = json{{"enabled", true},
               {"spacing", cfg.rsu->spacing},
               {"setback", cfg.rsu->setback},
               {"r_rsu", cfg.rsu->r_rsu},
               {"elevated", cfg.rsu->elevated}};
  } else {
    rsu = json{{"enabled", false}};
  }
  return json{{"freeway", freeway_to_json(cfg.base)},
              {"speed_s", cfg.speed_s},
              {"rsu", rsu},
              {"r_vehicle", cfg.r_vehicle},
              {"r_communication", cfg.r_communication},
              {"r_interest", cfg.r_interest},
              {"tau", cfg.tau},
              {"scheme", scheme_name(cfg.scheme)},
              {"dt", cfg.dt},
              {"duration", cfg.duration},
              {"object_boundary_samples", cfg.object_boundary_samples}};
}

}  // namespace covsim::config
