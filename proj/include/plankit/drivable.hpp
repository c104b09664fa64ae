#pragma once

#include <vector>

#include "plankit/scene.hpp"

namespace plankit {

// Point queries against the union of lane strips (centerline spans between
// the left/right boundaries, flat end caps). Containment is strict: points
// exactly on a boundary are outside.
class DrivableMap {
 public:
  explicit DrivableMap(const Scenario& scenario);

  bool contains(const Vec2& point) const;
  // 0 inside; otherwise the distance to the nearest lane strip.
  double outside_distance(const Vec2& point) const;
  // Heading of the nearest lane's centerline tangent at the projection of
  // `point`, plus the signed lateral offset. Returns false when no lanes.
  bool nearest_lane_frame(const Vec2& point, double* tangent_heading,
                          double* lateral, double* speed_limit) const;

  bool empty() const { return strips_.empty(); }

 private:
  struct Strip {
    const Lane* lane;
    std::vector<double> center_s;
    double min_x, max_x, min_y, max_y;
    double max_halfwidth;
  };

  double strip_outside_distance(const Strip& strip, const Vec2& p,
                                PolylineProjection* proj_out) const;

  std::vector<Strip> strips_;
};

}  // namespace plankit
