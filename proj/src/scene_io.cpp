#include "plankit/scene_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "plankit/errors.hpp"

namespace plankit {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

const json& field(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError("missing field '" + ctx + key + "'");
  return *it;
}

double num(const json& j, const char* key, const std::string& ctx) {
  const json& v = field(j, key, ctx);
  if (!v.is_number()) throw ParseError("field '" + ctx + key + "' must be a number");
  return v.get<double>();
}

std::vector<Vec2> point_list(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw ParseError("field '" + ctx + "' must be an array of [x, y]");
  std::vector<Vec2> pts;
  pts.reserve(j.size());
  for (const json& p : j) {
    if (!p.is_array() || p.size() != 2)
      throw ParseError("field '" + ctx + "' must contain [x, y] pairs");
    pts.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return pts;
}

json point_list_to_json(const std::vector<Vec2>& pts) {
  json out = json::array();
  for (const Vec2& p : pts) out.push_back(json::array({p.x, p.y}));
  return out;
}

AgentState state_from_json(const json& j, const std::string& ctx) {
  AgentState s;
  s.pose.x = num(j, "x", ctx);
  s.pose.y = num(j, "y", ctx);
  s.pose.heading = normalize_angle(num(j, "heading", ctx));
  s.velocity = {num(j, "vx", ctx), num(j, "vy", ctx)};
  s.box = {num(j, "length", ctx), num(j, "width", ctx)};
  const json& v = field(j, "valid", ctx);
  if (!v.is_boolean()) throw ParseError("field '" + ctx + "valid' must be a boolean");
  s.valid = v.get<bool>();
  return s;
}

json state_to_json(const AgentState& s) {
  return json{{"x", s.pose.x},         {"y", s.pose.y},
              {"heading", s.pose.heading}, {"vx", s.velocity.x},
              {"vy", s.velocity.y},    {"length", s.box.length},
              {"width", s.box.width},  {"valid", s.valid}};
}

AgentTrack track_from_json(const json& j, const std::string& ctx) {
  AgentTrack t;
  t.id = field(j, "id", ctx).get<std::string>();
  t.kind = agent_kind_from_string(field(j, "kind", ctx).get<std::string>());
  const json& hist = field(j, "history", ctx);
  if (!hist.is_array()) throw ParseError("field '" + ctx + "history' must be an array");
  for (const json& s : hist) t.history.push_back(state_from_json(s, ctx + "history."));
  if (j.contains("future_gt")) t.future_gt = point_list(j["future_gt"], ctx + "future_gt");
  return t;
}

json track_to_json(const AgentTrack& t) {
  json out;
  out["id"] = t.id;
  out["kind"] = to_string(t.kind);
  json hist = json::array();
  for (const AgentState& s : t.history) hist.push_back(state_to_json(s));
  out["history"] = std::move(hist);
  if (!t.future_gt.empty()) out["future_gt"] = point_list_to_json(t.future_gt);
  return out;
}

}  // namespace

Scenario load_scenario(const std::string& bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("document root must be an object");

  for (const char* key :
       {"version", "dt", "av", "agents", "obstacles", "lanes", "route_lane_ids",
        "traffic_lights"})
    field(doc, key, "");

  if (doc["version"].get<int>() != kSchemaVersion)
    throw ParseError("unsupported schema 'version'");

  Scenario s;
  s.dt = doc["dt"].get<double>();

  const json& av = doc["av"];
  s.av = track_from_json(av, "av.");
  s.av_acceleration = num(av, "acceleration", "av.");
  s.av_steering = num(av, "steering", "av.");

  for (const json& a : doc["agents"]) s.agents.push_back(track_from_json(a, "agents."));

  for (const json& o : doc["obstacles"]) {
    StaticObstacle obs;
    obs.pose.x = num(o, "x", "obstacles.");
    obs.pose.y = num(o, "y", "obstacles.");
    obs.pose.heading = normalize_angle(num(o, "heading", "obstacles."));
    obs.box = {num(o, "length", "obstacles."), num(o, "width", "obstacles.")};
    s.obstacles.push_back(obs);
  }

  for (const json& l : doc["lanes"]) {
    Lane lane;
    lane.id = field(l, "id", "lanes.").get<std::string>();
    lane.centerline = point_list(field(l, "centerline", "lanes."), "lanes.centerline");
    lane.left_boundary =
        point_list(field(l, "left_boundary", "lanes."), "lanes.left_boundary");
    lane.right_boundary =
        point_list(field(l, "right_boundary", "lanes."), "lanes.right_boundary");
    for (const json& succ : field(l, "successors", "lanes."))
      lane.successors.push_back(succ.get<std::string>());
    lane.speed_limit = num(l, "speed_limit", "lanes.");
    s.lanes.push_back(std::move(lane));
  }

  for (const json& rid : doc["route_lane_ids"])
    s.route_lane_ids.insert(rid.get<std::string>());

  const json& lights = doc["traffic_lights"];
  if (!lights.is_object()) throw ParseError("field 'traffic_lights' must be an object");
  for (auto it = lights.begin(); it != lights.end(); ++it) {
    bool found = false;
    for (Lane& lane : s.lanes)
      if (lane.id == it.key()) {
        lane.traffic_light = light_status_from_string(it.value().get<std::string>());
        found = true;
      }
    if (!found)
      throw ParseError("traffic_lights references unknown lane '" + it.key() + "'");
  }

  if (doc.contains("meta")) {
    const json& meta = doc["meta"];
    if (meta.contains("id")) s.id = meta["id"].get<std::string>();
    if (meta.contains("kind")) s.kind = meta["kind"].get<std::string>();
    if (meta.contains("seed")) s.seed = meta["seed"].get<std::uint64_t>();
  }

  validate_scenario(s);
  return s;
}

std::string save_scenario(const Scenario& s) {
  json doc;
  doc["version"] = kSchemaVersion;
  doc["dt"] = s.dt;

  json av = track_to_json(s.av);
  av["acceleration"] = s.av_acceleration;
  av["steering"] = s.av_steering;
  doc["av"] = std::move(av);

  json agents = json::array();
  for (const AgentTrack& a : s.agents) agents.push_back(track_to_json(a));
  doc["agents"] = std::move(agents);

  json obstacles = json::array();
  for (const StaticObstacle& o : s.obstacles)
    obstacles.push_back(json{{"x", o.pose.x},
                             {"y", o.pose.y},
                             {"heading", o.pose.heading},
                             {"length", o.box.length},
                             {"width", o.box.width}});
  doc["obstacles"] = std::move(obstacles);

  json lanes = json::array();
  json lights = json::object();
  for (const Lane& l : s.lanes) {
    lanes.push_back(json{{"id", l.id},
                         {"centerline", point_list_to_json(l.centerline)},
                         {"left_boundary", point_list_to_json(l.left_boundary)},
                         {"right_boundary", point_list_to_json(l.right_boundary)},
                         {"successors", l.successors},
                         {"speed_limit", l.speed_limit}});
    if (l.traffic_light != LightStatus::kUnknown)
      lights[l.id] = to_string(l.traffic_light);
  }
  doc["lanes"] = std::move(lanes);
  doc["traffic_lights"] = std::move(lights);
  doc["route_lane_ids"] = std::vector<std::string>(s.route_lane_ids.begin(),
                                                   s.route_lane_ids.end());

  if (!s.id.empty() || !s.kind.empty() || s.seed != 0)
    doc["meta"] = json{{"id", s.id}, {"kind", s.kind}, {"seed", s.seed}};

  return doc.dump(2) + "\n";
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

void save_scenario_file(const Scenario& scenario, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write scenario file '" + path + "'");
  out << save_scenario(scenario);
}

}  // namespace plankit
