#pragma once

#include <vector>

#include "plankit/geometry.hpp"

namespace plankit {

// One decoded plan point: position, heading as (cos, sin), velocity vector.
struct TrajectoryPoint {
  double x = 0.0;
  double y = 0.0;
  double cos_h = 1.0;
  double sin_h = 0.0;
  double vx = 0.0;
  double vy = 0.0;

  Vec2 position() const { return {x, y}; }
  double heading() const { return std::atan2(sin_h, cos_h); }
  double speed() const { return std::hypot(vx, vy); }
  bool operator==(const TrajectoryPoint&) const = default;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool operator==(const Trajectory&) const = default;
};

// Max |cos^2 + sin^2 - 1| over all points.
double heading_normalization_error(const Trajectory& traj);

}  // namespace plankit
