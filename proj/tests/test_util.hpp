#pragma once

#include <cmath>
#include <vector>

#include "plankit/scene.hpp"

namespace plankit::testutil {

// Independent oriented-box overlap oracle: corner containment plus proper
// edge crossings, deliberately a different algorithm from the SAT used in
// the library. Strict semantics (touching boxes do not overlap).
inline bool oracle_obb_overlap(const Obb& a, const Obb& b) {
  auto strictly_inside = [](const Obb& box, const Vec2& p) {
    const Vec2 local = box.pose.to_local(p);
    return std::abs(local.x) < 0.5 * box.length - 1e-12 &&
           std::abs(local.y) < 0.5 * box.width - 1e-12;
  };
  for (const Vec2& c : a.corners())
    if (strictly_inside(b, c)) return true;
  for (const Vec2& c : b.corners())
    if (strictly_inside(a, c)) return true;

  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return (q - p).cross(r - p);
  };
  auto proper_cross = [&](const Vec2& p1, const Vec2& p2, const Vec2& q1,
                          const Vec2& q2) {
    const double o1 = orient(p1, p2, q1);
    const double o2 = orient(p1, p2, q2);
    const double o3 = orient(q1, q2, p1);
    const double o4 = orient(q1, q2, p2);
    return o1 * o2 < -1e-12 && o3 * o4 < -1e-12;
  };
  const auto ca = a.corners();
  const auto cb = b.corners();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (proper_cross(ca[i], ca[(i + 1) % 4], cb[j], cb[(j + 1) % 4])) return true;
  return false;
}

inline AgentState make_state(double x, double y, double heading, double vx, double vy,
                             double length = 4.6, double width = 2.0,
                             bool valid = true) {
  AgentState s;
  s.pose = {x, y, normalize_angle(heading)};
  s.velocity = {vx, vy};
  s.box = {length, width};
  s.valid = valid;
  return s;
}

// Track with a constant-velocity history ending at (x, y) at the current
// frame.
inline AgentTrack make_track(const std::string& id, double x, double y, double heading,
                             double speed, double length = 4.6, double width = 2.0) {
  AgentTrack t;
  t.id = id;
  const Vec2 vel = Vec2{speed, 0.0}.rotated(heading);
  for (int k = 0; k < kHistorySteps; ++k) {
    const double back = (kHistorySteps - 1 - k) * kTickSeconds;
    t.history.push_back(make_state(x - vel.x * back, y - vel.y * back, heading, vel.x,
                                   vel.y, length, width));
  }
  return t;
}

inline Lane make_lane(const std::string& id, Vec2 start, double heading, double length,
                      double width, double speed_limit = 10.0, double spacing = 2.0) {
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

// Minimal valid scenario: one straight lane along +x with the AV at the
// origin.
inline Scenario make_straight_scenario(double av_speed = 10.0, double lane_width = 3.5,
                                       double speed_limit = 10.0) {
  Scenario s;
  s.lanes.push_back(make_lane("main", {-60.0, 0.0}, 0.0, 360.0, lane_width, speed_limit));
  s.route_lane_ids = {"main"};
  s.av = make_track("av", 0.0, 0.0, 0.0, av_speed);
  for (int t = 0; t < kFutureSteps; ++t)
    s.av.future_gt.push_back({av_speed * (t + 1) * kTickSeconds, 0.0});
  return s;
}

}  // namespace plankit::testutil
