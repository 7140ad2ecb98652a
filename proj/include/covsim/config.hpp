#pragma once

#include <stdexcept>
#include <string>

#include "covsim/analytics.hpp"
#include "covsim/temporal.hpp"
#include "covsim/v2i.hpp"

#include "json.hpp"

namespace covsim::config {

using json = nlohmann::json;

// Schema violation in a config file: unknown key, wrong type, bad value.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Strict reader over one JSON object: every key must be consumed, unknown
// keys are rejected by finish().
class StrictObject {
 public:
  StrictObject(const json& j, std::string context);

  template <typename T>
  void get(const char* key, T& out) {
    mark(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(context_ + "." + key + ": " + e.what());
    }
  }

  // Nested object (empty object when absent).
  json child(const char* key);
  bool has(const char* key) const { return j_.contains(key); }
  void finish() const;  // throws on unconsumed keys

 private:
  void mark(const char* key) { seen_.push_back(key); }

  const json& j_;
  std::string context_;
  std::vector<std::string> seen_;
};

json load_json_file(const std::string& path);

// Shared run controls; CLI flags override file values.
struct Common {
  Seed seed{1, 0};
  int seeds = 50;
  std::int64_t trials = 1000000;
  int jobs = 0;  // 0: COVSIM_JOBS env or hardware concurrency
  double resolution = 0.25;
  std::string out = "out.csv";

  json to_json() const;
};

Common parse_common(StrictObject& obj);

freeway::FreewayConfig parse_freeway(const json& j, const std::string& ctx,
                                     freeway::FreewayConfig base = {});
json freeway_to_json(const freeway::FreewayConfig& cfg);

analytics::DiscModelParams parse_disc_model(const json& j, const std::string& ctx,
                                            analytics::DiscModelParams base = {});
json disc_model_to_json(const analytics::DiscModelParams& p);

analytics::RoiSpec parse_roi(const json& j, const std::string& ctx,
                             const analytics::RoiSpec& fallback);
json roi_to_json(const analytics::RoiSpec& roi);

v2i::LaneParams parse_lane(const json& j, const std::string& ctx);
json lane_to_json(const v2i::LaneParams& p);

temporal::DynamicConfig parse_dynamic(const json& j, const std::string& ctx);
json dynamic_to_json(const temporal::DynamicConfig& cfg);

temporal::Scheme parse_scheme(const std::string& name);
std::string scheme_name(temporal::Scheme s);

}  // namespace covsim::config
