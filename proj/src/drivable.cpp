#include "plankit/drivable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace plankit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double half_width_at(const Lane& lane, const PolylineProjection& p) {
  const std::size_t i = p.segment;
  const Vec2 left =
      lane.left_boundary[i] + (lane.left_boundary[i + 1] - lane.left_boundary[i]) * p.fraction;
  const Vec2 right =
      lane.right_boundary[i] +
      (lane.right_boundary[i + 1] - lane.right_boundary[i]) * p.fraction;
  return 0.5 * (left - right).norm();
}
}  // namespace

DrivableMap::DrivableMap(const Scenario& scenario) {
  strips_.reserve(scenario.lanes.size());
  for (const Lane& lane : scenario.lanes) {
    Strip s{&lane, cumulative_arclength(lane.centerline), kInf, -kInf, kInf, -kInf, 0.0};
    for (std::size_t i = 0; i < lane.centerline.size(); ++i) {
      s.min_x = std::min(s.min_x, lane.centerline[i].x);
      s.max_x = std::max(s.max_x, lane.centerline[i].x);
      s.min_y = std::min(s.min_y, lane.centerline[i].y);
      s.max_y = std::max(s.max_y, lane.centerline[i].y);
      s.max_halfwidth = std::max(
          s.max_halfwidth, 0.5 * (lane.left_boundary[i] - lane.right_boundary[i]).norm() +
                               (lane.left_boundary[i] - lane.centerline[i]).norm());
    }
    strips_.push_back(std::move(s));
  }
}

double DrivableMap::strip_outside_distance(const Strip& strip, const Vec2& p,
                                           PolylineProjection* proj_out) const {
  const Lane& lane = *strip.lane;
  const PolylineProjection proj = project_to_polyline(lane.centerline, strip.center_s, p);
  if (proj_out) *proj_out = proj;
  const double hw = half_width_at(lane, proj);
  const std::vector<Vec2>& c = lane.centerline;

  // Beyond a flat end cap: split into along/past-cap and lateral excess.
  if (proj.segment == 0 && proj.fraction <= 0.0) {
    const Vec2 dir = (c[1] - c[0]).normalized();
    const Vec2 rel = p - c.front();
    const double along = rel.dot(dir);
    if (along <= 0.0)
      return std::hypot(-along, std::max(0.0, std::abs(rel.cross(dir)) - hw));
  }
  if (proj.segment == c.size() - 2 && proj.fraction >= 1.0) {
    const Vec2 dir = (c[c.size() - 1] - c[c.size() - 2]).normalized();
    const Vec2 rel = p - c.back();
    const double along = rel.dot(dir);
    if (along >= 0.0)
      return std::hypot(along, std::max(0.0, std::abs(dir.cross(rel)) - hw));
  }
  const double excess = std::abs(proj.lateral) - hw;
  return excess < 0.0 ? 0.0 : excess;
}

bool DrivableMap::contains(const Vec2& point) const {
  for (const Strip& strip : strips_) {
    if (point.x < strip.min_x - strip.max_halfwidth ||
        point.x > strip.max_x + strip.max_halfwidth ||
        point.y < strip.min_y - strip.max_halfwidth ||
        point.y > strip.max_y + strip.max_halfwidth)
      continue;
    PolylineProjection proj;
    const Lane& lane = *strip.lane;
    proj = project_to_polyline(lane.centerline, strip.center_s, point);
    const std::vector<Vec2>& c = lane.centerline;
    if (proj.segment == 0 && proj.fraction <= 0.0 &&
        (point - c.front()).dot(c[1] - c[0]) <= 0.0)
      continue;
    if (proj.segment == c.size() - 2 && proj.fraction >= 1.0 &&
        (point - c.back()).dot(c[c.size() - 1] - c[c.size() - 2]) >= 0.0)
      continue;
    if (std::abs(proj.lateral) < half_width_at(lane, proj)) return true;
  }
  return false;
}

double DrivableMap::outside_distance(const Vec2& point) const {
  double best = kInf;
  for (const Strip& strip : strips_) {
    // AABB lower bound on the strip distance for early rejection.
    const double dx = std::max({strip.min_x - strip.max_halfwidth - point.x, 0.0,
                                point.x - strip.max_x - strip.max_halfwidth});
    const double dy = std::max({strip.min_y - strip.max_halfwidth - point.y, 0.0,
                                point.y - strip.max_y - strip.max_halfwidth});
    if (std::hypot(dx, dy) >= best) continue;
    best = std::min(best, strip_outside_distance(strip, point, nullptr));
    if (best == 0.0) return 0.0;
  }
  return best == kInf ? kInf : best;
}

bool DrivableMap::nearest_lane_frame(const Vec2& point, double* tangent_heading,
                                     double* lateral, double* speed_limit) const {
  double best = kInf;
  bool found = false;
  for (const Strip& strip : strips_) {
    const Lane& lane = *strip.lane;
    const PolylineProjection proj =
        project_to_polyline(lane.centerline, strip.center_s, point);
    if (proj.distance < best) {
      best = proj.distance;
      const Vec2 a = lane.centerline[proj.segment];
      const Vec2 b = lane.centerline[proj.segment + 1];
      if (tangent_heading) *tangent_heading = std::atan2(b.y - a.y, b.x - a.x);
      if (lateral) *lateral = proj.lateral;
      if (speed_limit) *speed_limit = lane.speed_limit;
      found = true;
    }
  }
  return found;
}

}  // namespace plankit
