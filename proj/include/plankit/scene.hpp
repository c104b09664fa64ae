#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "plankit/geometry.hpp"

namespace plankit {

inline constexpr double kTickSeconds = 0.1;
inline constexpr int kHistorySteps = 20;  // T_H
inline constexpr int kFutureSteps = 80;   // T_F

enum class AgentKind { kVehicle, kPedestrian, kCyclist };
enum class LightStatus { kGreen, kYellow, kRed, kUnknown };

struct BoxDims {
  double length = 0.0;
  double width = 0.0;
  bool operator==(const BoxDims&) const = default;
};

struct AgentState {
  Pose2D pose;
  Vec2 velocity;
  BoxDims box;
  bool valid = true;
  bool operator==(const AgentState&) const = default;
};

struct AgentTrack {
  std::string id;
  AgentKind kind = AgentKind::kVehicle;
  std::vector<AgentState> history;          // oldest first; back() is current
  std::vector<Vec2> future_gt;              // optional ground-truth positions

  const AgentState& current() const { return history.back(); }
  Obb current_obb() const {
    return {current().pose, current().box.length, current().box.width};
  }
  bool operator==(const AgentTrack&) const = default;
};

struct StaticObstacle {
  Pose2D pose;
  BoxDims box;
  Obb obb() const { return {pose, box.length, box.width}; }
  bool operator==(const StaticObstacle&) const = default;
};

struct Lane {
  std::string id;
  std::vector<Vec2> centerline;
  std::vector<Vec2> left_boundary;
  std::vector<Vec2> right_boundary;
  std::vector<std::string> successors;
  double speed_limit = 0.0;
  LightStatus traffic_light = LightStatus::kUnknown;
  bool operator==(const Lane&) const = default;
};

struct Scenario {
  AgentTrack av;
  double av_acceleration = 0.0;  // current longitudinal accel, m/s^2
  double av_steering = 0.0;      // current steering angle, rad
  std::vector<AgentTrack> agents;
  std::vector<StaticObstacle> obstacles;
  std::vector<Lane> lanes;
  std::set<std::string> route_lane_ids;
  double dt = kTickSeconds;

  // Optional bookkeeping for benchmark suites.
  std::string id;
  std::string kind;
  std::uint64_t seed = 0;

  const Lane* find_lane(const std::string& lane_id) const;
  bool operator==(const Scenario&) const = default;
};

// Throws ValidationError on any violated invariant.
void validate_scenario(const Scenario& scenario);

using FeatureRow8 = std::array<double, 8>;

// Consecutive-frame difference features, one row per step:
// (dx, dy, dheading, dvx, dvy, length, width, observed).
// Rows touching an unobserved frame have zeroed difference channels.
std::vector<FeatureRow8> vectorize_agent_history(const AgentTrack& track);

// Per-point polyline features over a centerline resampled to n_p points:
// (p-p0, p-p_prev, p-p_left, p-p_right), with p_prev(0) := p0.
std::vector<FeatureRow8> vectorize_map_polyline(const Lane& lane, int n_p);

// Boundary points interpolated at the same parameter positions as a
// centerline resample (index correspondence between the three polylines).
std::vector<Vec2> resample_boundary_like_centerline(const Lane& lane,
                                                    const std::vector<Vec2>& boundary,
                                                    int n_p);

std::string to_string(AgentKind kind);
std::string to_string(LightStatus status);
AgentKind agent_kind_from_string(const std::string& s);
LightStatus light_status_from_string(const std::string& s);

}  // namespace plankit
