#include "plankit/scenario_gen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "plankit/errors.hpp"

namespace plankit {

namespace {

Lane make_straight_lane(const std::string& id, Vec2 start, double heading,
                        double length, double width, double speed_limit,
                        double spacing) {
  Lane lane;
  lane.id = id;
  lane.speed_limit = speed_limit;
  const Vec2 dir{std::cos(heading), std::sin(heading)};
  const Vec2 normal = dir.normal();
  const int n = std::max(2, static_cast<int>(std::round(length / spacing)) + 1);
  for (int i = 0; i < n; ++i) {
    const Vec2 p = start + dir * (length * i / (n - 1));
    lane.centerline.push_back(p);
    lane.left_boundary.push_back(p + normal * (0.5 * width));
    lane.right_boundary.push_back(p - normal * (0.5 * width));
  }
  return lane;
}

// Counter-clockwise arc: phi_start -> phi_end around `center`.
Lane make_arc_lane(const std::string& id, Vec2 center, double radius,
                   double phi_start, double phi_end, double width,
                   double speed_limit, double spacing) {
  Lane lane;
  lane.id = id;
  lane.speed_limit = speed_limit;
  const double arc = radius * std::abs(phi_end - phi_start);
  const int n = std::max(3, static_cast<int>(std::round(arc / std::min(spacing, 1.0))) + 1);
  for (int i = 0; i < n; ++i) {
    const double phi = phi_start + (phi_end - phi_start) * i / (n - 1);
    const Vec2 radial{std::cos(phi), std::sin(phi)};
    lane.centerline.push_back(center + radial * radius);
    // CCW: the left boundary is toward the center.
    lane.left_boundary.push_back(center + radial * (radius - 0.5 * width));
    lane.right_boundary.push_back(center + radial * (radius + 0.5 * width));
  }
  return lane;
}

AgentTrack make_track(const std::string& id, AgentKind kind, Vec2 pos, double heading,
                      double speed, const BoxDims& box) {
  AgentTrack track;
  track.id = id;
  track.kind = kind;
  const Vec2 vel = Vec2{speed, 0.0}.rotated(heading);
  track.history.resize(kHistorySteps);
  for (int k = 0; k < kHistorySteps; ++k) {
    AgentState s;
    const double t_back = (kHistorySteps - 1 - k) * kTickSeconds;
    s.pose = {pos.x - vel.x * t_back, pos.y - vel.y * t_back, normalize_angle(heading)};
    s.velocity = vel;
    s.box = box;
    s.valid = true;
    track.history[static_cast<std::size_t>(k)] = s;
  }
  return track;
}

std::vector<Vec2> gt_constant(Vec2 pos, double heading, double speed) {
  std::vector<Vec2> gt(kFutureSteps);
  const Vec2 vel = Vec2{speed, 0.0}.rotated(heading);
  for (int t = 0; t < kFutureSteps; ++t)
    gt[static_cast<std::size_t>(t)] = pos + vel * ((t + 1) * kTickSeconds);
  return gt;
}

// Station profile stopping exactly at s_stop with constant deceleration.
std::vector<double> profile_stop(double s0, double v0, double s_stop) {
  std::vector<double> s(kFutureSteps);
  const double dist = std::max(0.0, s_stop - s0);
  if (dist < 1e-6 || v0 < 1e-6) {
    std::fill(s.begin(), s.end(), std::min(s0, s_stop));
    return s;
  }
  const double decel = v0 * v0 / (2.0 * dist);
  const double t_stop = v0 / decel;
  for (int k = 0; k < kFutureSteps; ++k) {
    const double t = (k + 1) * kTickSeconds;
    s[static_cast<std::size_t>(k)] =
        t >= t_stop ? s_stop : s0 + v0 * t - 0.5 * decel * t * t;
  }
  return s;
}

std::vector<double> profile_constant(double s0, double v0) {
  std::vector<double> s(kFutureSteps);
  for (int k = 0; k < kFutureSteps; ++k)
    s[static_cast<std::size_t>(k)] = s0 + v0 * (k + 1) * kTickSeconds;
  return s;
}

// Stop at s_hold, wait until t_go, then accelerate toward v_target.
std::vector<double> profile_wait_go(double s0, double v0, double s_hold, double t_go,
                                    double accel, double v_target) {
  std::vector<double> out(kFutureSteps);
  const double dist = std::max(0.0, s_hold - s0);
  const double decel = dist > 1e-6 && v0 > 1e-6 ? v0 * v0 / (2.0 * dist) : 0.0;
  double s = s0, v = v0;
  for (int k = 0; k < kFutureSteps; ++k) {
    const double t = (k + 1) * kTickSeconds;
    if (t < t_go) {
      v = std::max(0.0, v - decel * kTickSeconds);
      s = std::min(s_hold, s + v * kTickSeconds);
    } else {
      v = std::min(v_target, v + accel * kTickSeconds);
      s += v * kTickSeconds;
    }
    out[static_cast<std::size_t>(k)] = s;
  }
  return out;
}

std::vector<Vec2> gt_from_path(const std::vector<Vec2>& path,
                               const std::vector<double>& stations) {
  const std::vector<double> arc = cumulative_arclength(path);
  std::vector<Vec2> gt(stations.size());
  for (std::size_t i = 0; i < stations.size(); ++i)
    gt[i] = polyline_interpolate(path, arc, stations[i]);
  return gt;
}

std::vector<Vec2> concat_centerlines(const std::vector<const Lane*>& lanes) {
  std::vector<Vec2> points;
  for (const Lane* lane : lanes)
    for (const Vec2& p : lane->centerline) {
      if (!points.empty() && (points.back() - p).norm() < 1e-9) continue;
      points.push_back(p);
    }
  return points;
}

Scenario straight_cruise(const GeneratorParams& p, Rng& rng) {
  Scenario s;
  const double v_lim = rng.uniform(8.0, 14.0);
  const double v0 = v_lim * rng.uniform(0.85, 1.0);
  Lane lane = make_straight_lane("main", {-80.0, 0.0}, 0.0, 400.0, p.lane_width, v_lim,
                                 p.point_spacing);
  s.lanes.push_back(std::move(lane));
  s.route_lane_ids = {"main"};
  s.av = make_track("av", AgentKind::kVehicle, {0.0, 0.0}, 0.0, v0, p.av_box);
  s.av.future_gt = gt_constant({0.0, 0.0}, 0.0, v0);
  return s;
}

Scenario stopped_lead(const GeneratorParams& p, Rng& rng) {
  Scenario s;
  const double v_lim = rng.uniform(8.0, 12.0);
  const double v0 = rng.uniform(5.0, 9.0);
  const double gap_target = rng.uniform(2.5, 4.0);
  double lead_x = rng.uniform(28.0, 40.0);
  // Keep the expert stop comfortable (<= 2 m/s^2).
  lead_x = std::max(lead_x, v0 * v0 / 4.0 + p.av_box.length + gap_target);

  s.lanes.push_back(make_straight_lane("main", {-60.0, 0.0}, 0.0, 360.0, p.lane_width,
                                       v_lim, p.point_spacing));
  s.route_lane_ids = {"main"};

  s.av = make_track("av", AgentKind::kVehicle, {0.0, 0.0}, 0.0, v0, p.av_box);
  const double stop_x = lead_x - p.av_box.length - gap_target;
  std::vector<double> stations = profile_stop(0.0, v0, stop_x);
  std::vector<Vec2> path = {{-60.0, 0.0}, {300.0, 0.0}};
  std::vector<double> shifted(stations.size());
  for (std::size_t i = 0; i < stations.size(); ++i) shifted[i] = stations[i] + 60.0;
  s.av.future_gt = gt_from_path(path, shifted);

  AgentTrack lead =
      make_track("lead", AgentKind::kVehicle, {lead_x, 0.0}, 0.0, 0.0, p.vehicle_box);
  lead.future_gt = gt_constant({lead_x, 0.0}, 0.0, 0.0);
  s.agents.push_back(std::move(lead));
  return s;
}

Scenario lane_blocked(const GeneratorParams& p, Rng& rng) {
  Scenario s;
  const double v_lim = rng.uniform(8.0, 11.0);
  const double v0 = rng.uniform(5.0, 8.0);
  const double obs_x = rng.uniform(35.0, 55.0);

  s.lanes.push_back(make_straight_lane("right", {-60.0, 0.0}, 0.0, 360.0, p.lane_width,
                                       v_lim, p.point_spacing));
  s.lanes.push_back(make_straight_lane("left", {-60.0, p.lane_width}, 0.0, 360.0,
                                       p.lane_width, v_lim, p.point_spacing));
  s.route_lane_ids = {"right", "left"};

  StaticObstacle obstacle;
  obstacle.pose = {obs_x, 0.0, 0.0};
  obstacle.box = {1.0, 3.0};
  s.obstacles.push_back(obstacle);

  s.av = make_track("av", AgentKind::kVehicle, {0.0, 0.0}, 0.0, v0, p.av_box);
  // Expert: quintic shift into the left lane well before the blockage.
  const double change_start = std::max(2.0, obs_x - 35.0);
  const double change_end = obs_x - 10.0;
  std::vector<Vec2> gt(kFutureSteps);
  for (int k = 0; k < kFutureSteps; ++k) {
    const double x = v0 * (k + 1) * kTickSeconds;
    double u = (x - change_start) / std::max(1.0, change_end - change_start);
    u = std::clamp(u, 0.0, 1.0);
    const double y = p.lane_width * (10.0 * u * u * u - 15.0 * u * u * u * u +
                                     6.0 * u * u * u * u * u);
    gt[static_cast<std::size_t>(k)] = {x, y};
  }
  s.av.future_gt = std::move(gt);
  return s;
}

Scenario red_light(const GeneratorParams& p, Rng& rng) {
  Scenario s;
  const double v_lim = rng.uniform(7.0, 10.0);
  const double stop_x = rng.uniform(30.0, 50.0);
  const double v0 = rng.uniform(4.0, 8.0);
  const double line_gap = rng.uniform(1.0, 2.5);

  Lane approach = make_straight_lane("approach", {-60.0, 0.0}, 0.0, 60.0 + stop_x,
                                     p.lane_width, v_lim, p.point_spacing);
  approach.successors = {"junction"};
  Lane junction = make_straight_lane("junction", {stop_x, 0.0}, 0.0, 20.0, p.lane_width,
                                     v_lim, p.point_spacing);
  junction.successors = {"exit"};
  junction.traffic_light = LightStatus::kRed;
  Lane exit_lane = make_straight_lane("exit", {stop_x + 20.0, 0.0}, 0.0, 220.0,
                                      p.lane_width, v_lim, p.point_spacing);
  s.lanes = {std::move(approach), std::move(junction), std::move(exit_lane)};
  s.route_lane_ids = {"approach", "junction", "exit"};

  s.av = make_track("av", AgentKind::kVehicle, {0.0, 0.0}, 0.0, v0, p.av_box);
  const double stop_center = stop_x - 0.5 * p.av_box.length - line_gap;
  std::vector<Vec2> path = {{-60.0, 0.0}, {stop_x + 240.0, 0.0}};
  std::vector<double> stations = profile_stop(60.0, v0, 60.0 + stop_center);
  s.av.future_gt = gt_from_path(path, stations);
  return s;
}

Scenario unprotected_left(const GeneratorParams& p, Rng& rng) {
  Scenario s;
  const double v_lim = rng.uniform(6.0, 9.0);
  const double d_av = rng.uniform(15.0, 25.0);
  const double v0 = rng.uniform(3.0, 6.0);
  const double agent_x = rng.uniform(25.0, 45.0);
  const double agent_v = rng.uniform(6.0, 9.0);
  const double turn_radius = 12.0;

  Lane approach = make_straight_lane("approach", {-80.0, 0.0}, 0.0, 80.0, p.lane_width,
                                     v_lim, p.point_spacing);
  approach.successors = {"turn"};
  Lane turn = make_arc_lane("turn", {0.0, turn_radius}, turn_radius, -M_PI / 2.0, 0.0,
                            p.junction_lane_width, std::min(v_lim, 6.0),
                            p.point_spacing);
  turn.successors = {"exit"};
  Lane exit_lane = make_straight_lane("exit", {turn_radius, turn_radius}, M_PI / 2.0,
                                      150.0, p.lane_width, v_lim, p.point_spacing);
  Lane oncoming = make_straight_lane("oncoming", {agent_x + 60.0, p.lane_width}, M_PI,
                                     agent_x + 140.0, p.lane_width, v_lim,
                                     p.point_spacing);
  s.lanes = {std::move(approach), std::move(turn), std::move(exit_lane),
             std::move(oncoming)};
  s.route_lane_ids = {"approach", "turn", "exit"};

  s.av = make_track("av", AgentKind::kVehicle, {-d_av, 0.0}, 0.0, v0, p.av_box);

  AgentTrack other = make_track("oncoming_vehicle", AgentKind::kVehicle,
                                {agent_x, p.lane_width}, M_PI, agent_v, p.vehicle_box);
  other.future_gt = gt_constant({agent_x, p.lane_width}, M_PI, agent_v);
  s.agents.push_back(std::move(other));

  // Expert: yield at the junction entry until the oncoming vehicle clears.
  const std::vector<const Lane*> route = {&s.lanes[0], &s.lanes[1], &s.lanes[2]};
  const std::vector<Vec2> path = concat_centerlines(route);
  const double s0 = 80.0 - d_av;
  const double s_hold = 80.0 - 3.0;
  const double t_clear = (agent_x - 2.0) / agent_v;
  const std::vector<double> stations =
      profile_wait_go(s0, v0, s_hold, t_clear, 1.2, 5.0);
  s.av.future_gt = gt_from_path(path, stations);
  return s;
}

Scenario lane_change(const GeneratorParams& p, Rng& rng) {
  Scenario s;
  const double v_lim = rng.uniform(10.0, 13.0);
  const double v0 = rng.uniform(7.0, 10.0);
  const double lead_x = rng.uniform(20.0, 30.0);
  const double lead_v = rng.uniform(2.0, 4.0);

  s.lanes.push_back(make_straight_lane("right", {-60.0, 0.0}, 0.0, 360.0, p.lane_width,
                                       v_lim, p.point_spacing));
  s.lanes.push_back(make_straight_lane("left", {-60.0, p.lane_width}, 0.0, 360.0,
                                       p.lane_width, v_lim, p.point_spacing));
  s.route_lane_ids = {"right", "left"};

  s.av = make_track("av", AgentKind::kVehicle, {0.0, 0.0}, 0.0, v0, p.av_box);
  std::vector<Vec2> gt(kFutureSteps);
  const double change_start = 5.0, change_len = 30.0;
  for (int k = 0; k < kFutureSteps; ++k) {
    const double x = v0 * (k + 1) * kTickSeconds;
    double u = std::clamp((x - change_start) / change_len, 0.0, 1.0);
    const double y = p.lane_width * (10.0 * u * u * u - 15.0 * u * u * u * u +
                                     6.0 * u * u * u * u * u);
    gt[static_cast<std::size_t>(k)] = {x, y};
  }
  s.av.future_gt = std::move(gt);

  AgentTrack lead = make_track("slow_lead", AgentKind::kVehicle, {lead_x, 0.0}, 0.0,
                               lead_v, p.vehicle_box);
  lead.future_gt = gt_constant({lead_x, 0.0}, 0.0, lead_v);
  s.agents.push_back(std::move(lead));
  return s;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kStraightCruise: return "straight_cruise";
    case ScenarioKind::kStoppedLead: return "stopped_lead";
    case ScenarioKind::kLaneBlocked: return "lane_blocked";
    case ScenarioKind::kRedLight: return "red_light";
    case ScenarioKind::kUnprotectedLeft: return "unprotected_left";
    case ScenarioKind::kLaneChange: return "lane_change";
  }
  return "straight_cruise";
}

ScenarioKind scenario_kind_from_string(const std::string& s) {
  for (ScenarioKind kind : all_scenario_kinds())
    if (to_string(kind) == s) return kind;
  throw ParseError("unknown scenario kind '" + s + "'");
}

std::vector<ScenarioKind> all_scenario_kinds() {
  return {ScenarioKind::kStraightCruise, ScenarioKind::kStoppedLead,
          ScenarioKind::kLaneBlocked,    ScenarioKind::kRedLight,
          ScenarioKind::kUnprotectedLeft, ScenarioKind::kLaneChange};
}

Scenario generate_scenario(ScenarioKind kind, const GeneratorParams& params,
                           std::uint64_t seed) {
  Rng rng(seed ^ (static_cast<std::uint64_t>(kind) << 56));
  Scenario s;
  switch (kind) {
    case ScenarioKind::kStraightCruise: s = straight_cruise(params, rng); break;
    case ScenarioKind::kStoppedLead: s = stopped_lead(params, rng); break;
    case ScenarioKind::kLaneBlocked: s = lane_blocked(params, rng); break;
    case ScenarioKind::kRedLight: s = red_light(params, rng); break;
    case ScenarioKind::kUnprotectedLeft: s = unprotected_left(params, rng); break;
    case ScenarioKind::kLaneChange: s = lane_change(params, rng); break;
  }
  s.kind = to_string(kind);
  s.seed = seed;
  s.id = s.kind + "_" + std::to_string(seed);
  s.dt = kTickSeconds;
  validate_scenario(s);
  return s;
}

}  // namespace plankit
