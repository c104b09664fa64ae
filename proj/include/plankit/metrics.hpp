#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plankit/control.hpp"
#include "plankit/drivable.hpp"
#include "plankit/lane_graph.hpp"
#include "plankit/scene.hpp"

namespace plankit {

struct AgentSnapshot {
  Pose2D pose;
  Vec2 velocity;
  BoxDims box;
  bool valid = true;
};

// AV + agent state sequences at a fixed tick; the common input of every
// closed-loop metric (full episodes and candidate-rollout windows alike).
struct EpisodeTrace {
  std::vector<BicycleState> av_states;  // length N+1 (initial + N ticks)
  BoxDims av_box;
  std::vector<std::vector<AgentSnapshot>> agents;  // per agent, length N+1
  double dt = 0.1;
};

struct MetricThresholds {
  double ttc_bound = 0.95;            // s
  double ttc_horizon = 3.0;           // s
  double ttc_step = 0.1;              // s
  double drivable_tolerance = 0.3;    // m
  double direction_window = 1.0;      // s
  double direction_minor = 2.0;       // m, score 1 below this
  double direction_major = 6.0;       // m, score 0.5 below this
  double max_lon_accel = 2.40;        // m/s^2
  double min_lon_accel = -4.05;       // m/s^2
  double max_lat_accel = 4.89;        // m/s^2
  double max_jerk = 8.37;             // m/s^3
  double max_lon_jerk = 4.13;         // m/s^3
  double max_yaw_rate = 0.95;         // rad/s
  double max_yaw_accel = 1.93;        // rad/s^2
  double overspeed_norm = 2.23;       // m/s
  double min_expert_progress = 0.1;   // m
  double stationary_speed = 0.05;     // m/s
};

struct CollisionRecord {
  std::size_t tick = 0;
  int agent_index = -1;     // -1 when the collision is with a static obstacle
  int obstacle_index = -1;
  bool rear_contact = false;
};

struct CollisionResult {
  bool at_fault = false;
  std::optional<CollisionRecord> first;
};

// Oriented-box overlap per tick; a collision is at-fault unless the AV is
// stationary or the contact lies on the AV's rear half while it is in-lane.
CollisionResult at_fault_collision(const EpisodeTrace& trace,
                                   const std::vector<StaticObstacle>& obstacles,
                                   const DrivableMap& drivable,
                                   const MetricThresholds& thresholds = {});

// Constant-velocity projection at every tick; passes iff the minimum time to
// overlap stays above the bound.
bool ttc_within_bound(const EpisodeTrace& trace,
                      const MetricThresholds& thresholds = {});

// All four footprint corners within the lane-strip union (with tolerance) at
// every tick.
bool drivable_compliance(const EpisodeTrace& trace, const DrivableMap& drivable,
                         const MetricThresholds& thresholds = {});

// 1 / 0.5 / 0 by the worst distance traveled against the nearest lane's
// direction inside any 1 s window.
double driving_direction(const EpisodeTrace& trace, const DrivableMap& drivable,
                         const MetricThresholds& thresholds = {});

// Acceleration / jerk / yaw bounds on 5-tap smoothed central differences.
bool comfort(const EpisodeTrace& trace, const MetricThresholds& thresholds = {});

// Ratio of route-projected arclength to the expert's, clamped to [0, 1].
double progress_ratio(const EpisodeTrace& trace, const ReferenceLine& route,
                      double expert_distance, const MetricThresholds& thresholds = {});

double route_projected_distance(const std::vector<Vec2>& positions,
                                const ReferenceLine& route);

// 1 - time-weighted mean overspeed / norm, clamped to [0, 1].
double speed_compliance(const EpisodeTrace& trace, const DrivableMap& drivable,
                        const MetricThresholds& thresholds = {});

struct MetricReport {
  double no_at_fault_collision = 1.0;  // {0, 1}
  double ttc_within_bound = 1.0;       // {0, 1}
  double drivable_compliance = 1.0;    // {0, 1}
  double driving_direction = 1.0;      // {0, 0.5, 1}
  double comfort = 1.0;                // {0, 1}
  double progress = 1.0;               // [0, 1]
  double speed_compliance = 1.0;       // [0, 1]
  double aggregate = 1.0;              // [0, 1]
};

// Multiplier metrics gate a weighted average of the scored ones
// (weights ttc 5, progress 5, speed 4, comfort 2).
double aggregate_score(const MetricReport& report);

// Full evaluation of an episode trace against its scenario.
MetricReport evaluate_episode(const EpisodeTrace& trace, const Scenario& scenario,
                              const MetricThresholds& thresholds = {});

std::string metric_report_to_json(const MetricReport& report);

}  // namespace plankit
