#include "plankit/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "plankit/errors.hpp"

namespace plankit {

namespace {

using nlohmann::json;

// Single registry of every dotted key with its accessor.
struct Entry {
  std::function<double(const Config&)> get;
  std::function<void(Config&, double)> set;
};

const std::map<std::string, Entry>& registry() {
  static const std::map<std::string, Entry> entries = [] {
    std::map<std::string, Entry> m;
    auto add = [&m](const std::string& key, auto accessor) {
      m[key] = Entry{
          [accessor](const Config& c) -> double { return accessor(const_cast<Config&>(c)); },
          [accessor](Config& c, double v) { accessor(c) = v; }};
    };
    auto add_int = [&m](const std::string& key, auto accessor) {
      m[key] = Entry{
          [accessor](const Config& c) -> double {
            return static_cast<double>(accessor(const_cast<Config&>(c)));
          },
          [accessor](Config& c, double v) {
            accessor(c) = static_cast<int>(std::lround(v));
          }};
    };

    add("reference_line.search_radius",
        [](Config& c) -> double& { return c.planner.reference_lines.search_radius; });
    add("reference_line.max_length",
        [](Config& c) -> double& { return c.planner.reference_lines.max_length; });
    add_int("reference_line.num_points",
            [](Config& c) -> int& { return c.planner.reference_lines.num_points; });

    add_int("costmap.height", [](Config& c) -> int& { return c.grid.height; });
    add_int("costmap.width", [](Config& c) -> int& { return c.grid.width; });
    add("costmap.resolution", [](Config& c) -> double& { return c.grid.resolution; });

    add("circles.radius", [](Config& c) -> double& { return c.circles.radius; });
    add("circles.epsilon", [](Config& c) -> double& { return c.circles.epsilon; });

    add("losses.sigma", [](Config& c) -> double& { return c.contrastive_sigma; });
    add("losses.w_imitation", [](Config& c) -> double& { return c.loss_weights.imitation; });
    add("losses.w_prediction",
        [](Config& c) -> double& { return c.loss_weights.prediction; });
    add("losses.w_auxiliary", [](Config& c) -> double& { return c.loss_weights.auxiliary; });
    add("losses.w_contrastive",
        [](Config& c) -> double& { return c.loss_weights.contrastive; });

    add_int("proposer.num_lon", [](Config& c) -> int& { return c.planner.proposer.num_lon; });
    add_int("proposer.horizon_steps",
            [](Config& c) -> int& { return c.planner.proposer.horizon_steps; });
    add("proposer.lateral_blend_distance",
        [](Config& c) -> double& { return c.planner.proposer.lateral_blend_distance; });
    add("proposer.planner_min_gap",
        [](Config& c) -> double& { return c.planner.proposer.planner_min_gap; });

    add("idm.max_accel", [](Config& c) -> double& { return c.planner.proposer.idm.max_accel; });
    add("idm.comfort_decel",
        [](Config& c) -> double& { return c.planner.proposer.idm.comfort_decel; });
    add("idm.min_gap", [](Config& c) -> double& { return c.planner.proposer.idm.min_gap; });
    add("idm.time_headway",
        [](Config& c) -> double& { return c.planner.proposer.idm.time_headway; });
    add("idm.max_decel", [](Config& c) -> double& { return c.planner.proposer.idm.max_decel; });

    add_int("lqr.horizon", [](Config& c) -> int& { return c.planner.lqr.horizon; });
    add("lqr.q_lateral", [](Config& c) -> double& { return c.planner.lqr.q_lateral; });
    add("lqr.q_heading", [](Config& c) -> double& { return c.planner.lqr.q_heading; });
    add("lqr.r_steering", [](Config& c) -> double& { return c.planner.lqr.r_steering; });
    add("lqr.k_speed", [](Config& c) -> double& { return c.planner.lqr.k_speed; });
    add("lqr.k_station", [](Config& c) -> double& { return c.planner.lqr.k_station; });

    add("vehicle.wheelbase", [](Config& c) -> double& { return c.planner.vehicle.wheelbase; });
    add("vehicle.max_accel", [](Config& c) -> double& { return c.planner.vehicle.max_accel; });
    add("vehicle.max_decel", [](Config& c) -> double& { return c.planner.vehicle.max_decel; });
    add("vehicle.max_steering",
        [](Config& c) -> double& { return c.planner.vehicle.max_steering; });

    add("metrics.ttc_bound", [](Config& c) -> double& { return c.planner.thresholds.ttc_bound; });
    add("metrics.ttc_horizon",
        [](Config& c) -> double& { return c.planner.thresholds.ttc_horizon; });
    add("metrics.drivable_tolerance",
        [](Config& c) -> double& { return c.planner.thresholds.drivable_tolerance; });
    add("metrics.direction_minor",
        [](Config& c) -> double& { return c.planner.thresholds.direction_minor; });
    add("metrics.direction_major",
        [](Config& c) -> double& { return c.planner.thresholds.direction_major; });
    add("metrics.max_lon_accel",
        [](Config& c) -> double& { return c.planner.thresholds.max_lon_accel; });
    add("metrics.min_lon_accel",
        [](Config& c) -> double& { return c.planner.thresholds.min_lon_accel; });
    add("metrics.max_lat_accel",
        [](Config& c) -> double& { return c.planner.thresholds.max_lat_accel; });
    add("metrics.max_jerk", [](Config& c) -> double& { return c.planner.thresholds.max_jerk; });
    add("metrics.max_lon_jerk",
        [](Config& c) -> double& { return c.planner.thresholds.max_lon_jerk; });
    add("metrics.max_yaw_rate",
        [](Config& c) -> double& { return c.planner.thresholds.max_yaw_rate; });
    add("metrics.max_yaw_accel",
        [](Config& c) -> double& { return c.planner.thresholds.max_yaw_accel; });
    add("metrics.overspeed_norm",
        [](Config& c) -> double& { return c.planner.thresholds.overspeed_norm; });

    add_int("selection.top_k", [](Config& c) -> int& { return c.planner.top_k; });
    add("selection.alpha", [](Config& c) -> double& { return c.planner.alpha; });

    add("augment.perturb_longitudinal",
        [](Config& c) -> double& { return c.augment.perturbation.longitudinal; });
    add("augment.perturb_lateral",
        [](Config& c) -> double& { return c.augment.perturbation.lateral; });
    add("augment.perturb_speed",
        [](Config& c) -> double& { return c.augment.perturbation.speed; });
    add("augment.perturb_accel",
        [](Config& c) -> double& { return c.augment.perturbation.accel; });
    add("augment.perturb_steering",
        [](Config& c) -> double& { return c.augment.perturbation.steering; });
    add("augment.dropout_probability",
        [](Config& c) -> double& { return c.augment.dropout_probability; });
    add("augment.corridor_ahead",
        [](Config& c) -> double& { return c.augment.corridor_ahead; });
    add("augment.corridor_halfwidth",
        [](Config& c) -> double& { return c.augment.corridor_halfwidth; });
    add("augment.insertion_min_distance",
        [](Config& c) -> double& { return c.augment.insertion_min_distance; });
    add("augment.insertion_max_distance",
        [](Config& c) -> double& { return c.augment.insertion_max_distance; });

    add("generator.lane_width", [](Config& c) -> double& { return c.generator.lane_width; });
    add("generator.junction_lane_width",
        [](Config& c) -> double& { return c.generator.junction_lane_width; });
    return m;
  }();
  return entries;
}

// circles.offsets is the one list-valued key; handled separately.
void apply_offsets(Config& config, const json& value) {
  if (!value.is_array() || value.empty())
    throw ParseError("config key 'circles.offsets' must be a non-empty array");
  config.circles.offsets.clear();
  for (const json& v : value) config.circles.offsets.push_back(v.get<double>());
}

}  // namespace

std::map<std::string, double> Config::to_flat() const {
  std::map<std::string, double> out;
  for (const auto& [key, entry] : registry()) out[key] = entry.get(*this);
  return out;
}

void Config::apply(const std::string& dotted_key, double value) {
  auto it = registry().find(dotted_key);
  if (it == registry().end())
    throw ParseError("unknown config key '" + dotted_key + "'");
  it->second.set(*this, value);
}

std::vector<std::pair<std::string, double>> config_overrides_from_env(
    char** environ_ptr) {
  std::vector<std::pair<std::string, double>> out;
  const std::string prefix = "PLANKIT_";
  for (char** env = environ_ptr; env && *env; ++env) {
    const std::string entry(*env);
    if (entry.rfind(prefix, 0) != 0) continue;
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos) continue;
    std::string key = entry.substr(prefix.size(), eq - prefix.size());
    const std::string value = entry.substr(eq + 1);
    // SECTION__KEY -> section.key
    std::string dotted;
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (key[i] == '_' && i + 1 < key.size() && key[i + 1] == '_') {
        dotted += '.';
        ++i;
      } else {
        dotted += static_cast<char>(std::tolower(key[i]));
      }
    }
    try {
      out.emplace_back(dotted, std::stod(value));
    } catch (const std::exception&) {
      throw ParseError("environment override " + entry + " is not numeric");
    }
  }
  return out;
}

Config load_config(const ConfigOverrides& overrides) {
  Config config;

  if (!overrides.file_path.empty()) {
    std::ifstream in(overrides.file_path);
    if (!in) throw ParseError("cannot open config file '" + overrides.file_path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    json doc;
    try {
      doc = json::parse(ss.str());
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid config JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("config root must be an object");
    for (auto section = doc.begin(); section != doc.end(); ++section) {
      if (!section.value().is_object())
        throw ParseError("config section '" + section.key() + "' must be an object");
      for (auto kv = section.value().begin(); kv != section.value().end(); ++kv) {
        const std::string dotted = section.key() + "." + kv.key();
        if (dotted == "circles.offsets") {
          apply_offsets(config, kv.value());
          continue;
        }
        if (!kv.value().is_number())
          throw ParseError("config key '" + dotted + "' must be a number");
        config.apply(dotted, kv.value().get<double>());
      }
    }
  }

  for (const auto& [key, value] : overrides.env_overrides) config.apply(key, value);
  for (const auto& [key, value] : overrides.flag_overrides) config.apply(key, value);
  return config;
}

std::string config_to_json(const Config& config) {
  json doc;
  for (const auto& [key, value] : config.to_flat()) {
    const std::size_t dot = key.find('.');
    doc[key.substr(0, dot)][key.substr(dot + 1)] = value;
  }
  doc["circles"]["offsets"] = config.circles.offsets;
  return doc.dump(2) + "\n";
}

}  // namespace plankit
