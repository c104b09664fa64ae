#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plankit/scene.hpp"

namespace plankit {

// Resampled lane-centerline path used as the lateral anchor for proposals
// and supervision. `arclength` is the (exactly uniform) resampling parameter
// measured along the source polyline; `headings` are central-difference
// tangents of the resampled points.
struct ReferenceLine {
  std::vector<Vec2> points;
  std::vector<double> headings;
  std::vector<double> arclength;
  std::vector<std::string> source_lane_ids;

  double length() const { return arclength.empty() ? 0.0 : arclength.back(); }
  Vec2 point_at(double s) const;
  double heading_at(double s) const;
  // Signed curvature from heading differences, piecewise constant.
  double curvature_at(double s) const;
};

struct FrenetCoord {
  double s = 0.0;  // arclength, clamped to [0, length]
  double d = 0.0;  // signed lateral, positive left of the tangent
};

struct ReferenceLineParams {
  double search_radius = 120.0;  // lane segments considered as DFS roots
  double max_length = 120.0;     // truncation arclength
  int num_points = 120;
};

// Depth-first traversal of successor links from every lane within
// `search_radius` of the AV; concatenated centerlines truncated to
// `max_length` and resampled. Paths whose lane-id sequence is contained in
// another path's sequence are dropped; output is sorted by lane-id sequence.
std::vector<ReferenceLine> find_reference_lines(const Scenario& scenario,
                                                const ReferenceLineParams& params = {});

FrenetCoord project(const ReferenceLine& ref, const Vec2& point);

// Index of the reference line with the smallest |lateral| at `point`.
std::optional<std::size_t> nearest_reference_line(
    const std::vector<ReferenceLine>& refs, const Vec2& point);

// Reference line following the scenario's route lanes from the lane nearest
// the AV through successor links; empty when the route is empty.
std::optional<ReferenceLine> route_reference_line(const Scenario& scenario,
                                                  double max_length = 500.0);

}  // namespace plankit
