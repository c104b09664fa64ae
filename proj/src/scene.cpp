#include "plankit/scene.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "plankit/errors.hpp"

namespace plankit {

const Lane* Scenario::find_lane(const std::string& lane_id) const {
  for (const Lane& lane : lanes)
    if (lane.id == lane_id) return &lane;
  return nullptr;
}

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

void validate_track(const AgentTrack& track, bool is_av) {
  require(!track.history.empty(), "track '" + track.id + "': empty history");
  require(static_cast<int>(track.history.size()) == kHistorySteps,
          "track '" + track.id + "': history length must be " +
              std::to_string(kHistorySteps));
  for (const AgentState& s : track.history) {
    require(s.box.length > 0.0 && s.box.width > 0.0,
            "track '" + track.id + "': box dims must be positive");
    require(std::isfinite(s.pose.x) && std::isfinite(s.pose.y),
            "track '" + track.id + "': non-finite pose");
  }
  if (!track.future_gt.empty())
    require(static_cast<int>(track.future_gt.size()) == kFutureSteps,
            "track '" + track.id + "': future_gt length must be " +
                std::to_string(kFutureSteps));
  if (is_av)
    require(track.history.back().valid, "av: current frame must be observed");
}

}  // namespace

void validate_scenario(const Scenario& scenario) {
  require(std::abs(scenario.dt - kTickSeconds) < 1e-9, "dt must be 0.1");
  validate_track(scenario.av, /*is_av=*/true);

  std::set<std::string> ids;
  for (const AgentTrack& agent : scenario.agents) {
    validate_track(agent, /*is_av=*/false);
    require(ids.insert(agent.id).second, "duplicate agent id '" + agent.id + "'");
  }

  for (const StaticObstacle& obs : scenario.obstacles)
    require(obs.box.length > 0.0 && obs.box.width > 0.0,
            "obstacle box dims must be positive");

  std::set<std::string> lane_ids;
  for (const Lane& lane : scenario.lanes) {
    require(lane.centerline.size() >= 2,
            "lane '" + lane.id + "': centerline needs >= 2 points");
    require(lane.left_boundary.size() == lane.centerline.size() &&
                lane.right_boundary.size() == lane.centerline.size(),
            "lane '" + lane.id + "': boundary point counts must match centerline");
    require(polyline_length(lane.centerline) > 0.0,
            "lane '" + lane.id + "': degenerate centerline");
    require(lane_ids.insert(lane.id).second, "duplicate lane id '" + lane.id + "'");
  }
  for (const Lane& lane : scenario.lanes)
    for (const std::string& succ : lane.successors)
      require(lane_ids.count(succ) > 0,
              "lane '" + lane.id + "': unknown successor '" + succ + "'");
  for (const std::string& rid : scenario.route_lane_ids)
    require(lane_ids.count(rid) > 0, "route references unknown lane '" + rid + "'");
}

std::vector<FeatureRow8> vectorize_agent_history(const AgentTrack& track) {
  if (track.history.size() < 2)
    throw std::invalid_argument("vectorize_agent_history: history shorter than 2 frames");
  std::vector<FeatureRow8> rows(track.history.size() - 1);
  for (std::size_t t = 1; t < track.history.size(); ++t) {
    const AgentState& prev = track.history[t - 1];
    const AgentState& cur = track.history[t];
    FeatureRow8& row = rows[t - 1];
    const bool observed = prev.valid && cur.valid;
    if (observed) {
      row[0] = cur.pose.x - prev.pose.x;
      row[1] = cur.pose.y - prev.pose.y;
      row[2] = normalize_angle(cur.pose.heading - prev.pose.heading);
      row[3] = cur.velocity.x - prev.velocity.x;
      row[4] = cur.velocity.y - prev.velocity.y;
    } else {
      row[0] = row[1] = row[2] = row[3] = row[4] = 0.0;
    }
    row[5] = cur.box.length;
    row[6] = cur.box.width;
    row[7] = observed ? 1.0 : 0.0;
  }
  return rows;
}

std::vector<Vec2> resample_boundary_like_centerline(const Lane& lane,
                                                    const std::vector<Vec2>& boundary,
                                                    int n_p) {
  // The boundary is parameterized by the centerline's arclength fraction so
  // that resampled centerline/boundary points stay in index correspondence.
  const std::vector<double> s = cumulative_arclength(lane.centerline);
  const double total = s.back();
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(n_p));
  for (int i = 0; i < n_p; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(n_p - 1);
    // Locate the centerline parameter, then apply the same (segment, fraction)
    // position to the boundary polyline.
    const double si = frac * total;
    auto it = std::upper_bound(s.begin(), s.end(), si);
    std::size_t k = std::min<std::size_t>(
        std::max<std::ptrdiff_t>(1, it - s.begin()), lane.centerline.size() - 1);
    const double seg = s[k] - s[k - 1];
    const double t = seg > 0.0 ? (si - s[k - 1]) / seg : 0.0;
    out.push_back(boundary[k - 1] + (boundary[k] - boundary[k - 1]) * t);
  }
  return out;
}

std::vector<FeatureRow8> vectorize_map_polyline(const Lane& lane, int n_p) {
  if (n_p < 2) throw std::invalid_argument("vectorize_map_polyline: n_p must be >= 2");
  if (lane.centerline.size() < 2 || polyline_length(lane.centerline) <= 0.0)
    throw std::invalid_argument("vectorize_map_polyline: degenerate centerline");

  const std::vector<Vec2> center = resample_polyline(lane.centerline, n_p);
  const std::vector<Vec2> left =
      resample_boundary_like_centerline(lane, lane.left_boundary, n_p);
  const std::vector<Vec2> right =
      resample_boundary_like_centerline(lane, lane.right_boundary, n_p);

  std::vector<FeatureRow8> rows(static_cast<std::size_t>(n_p));
  for (int i = 0; i < n_p; ++i) {
    const Vec2 p = center[static_cast<std::size_t>(i)];
    const Vec2 prev = i == 0 ? p : center[static_cast<std::size_t>(i - 1)];
    FeatureRow8& row = rows[static_cast<std::size_t>(i)];
    row[0] = p.x - center[0].x;
    row[1] = p.y - center[0].y;
    row[2] = p.x - prev.x;
    row[3] = p.y - prev.y;
    row[4] = p.x - left[static_cast<std::size_t>(i)].x;
    row[5] = p.y - left[static_cast<std::size_t>(i)].y;
    row[6] = p.x - right[static_cast<std::size_t>(i)].x;
    row[7] = p.y - right[static_cast<std::size_t>(i)].y;
  }
  return rows;
}

std::string to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::kVehicle: return "vehicle";
    case AgentKind::kPedestrian: return "pedestrian";
    case AgentKind::kCyclist: return "cyclist";
  }
  return "vehicle";
}

std::string to_string(LightStatus status) {
  switch (status) {
    case LightStatus::kGreen: return "green";
    case LightStatus::kYellow: return "yellow";
    case LightStatus::kRed: return "red";
    case LightStatus::kUnknown: return "unknown";
  }
  return "unknown";
}

AgentKind agent_kind_from_string(const std::string& s) {
  if (s == "vehicle") return AgentKind::kVehicle;
  if (s == "pedestrian") return AgentKind::kPedestrian;
  if (s == "cyclist") return AgentKind::kCyclist;
  throw ParseError("unknown agent kind '" + s + "'");
}

LightStatus light_status_from_string(const std::string& s) {
  if (s == "green") return LightStatus::kGreen;
  if (s == "yellow") return LightStatus::kYellow;
  if (s == "red") return LightStatus::kRed;
  if (s == "unknown") return LightStatus::kUnknown;
  throw ParseError("unknown traffic light status '" + s + "'");
}

}  // namespace plankit
