#include "plankit/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "plankit/lane_graph.hpp"

namespace plankit {

namespace {

struct Bounds {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void add(const Vec2& p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  void pad(double m) {
    min_x -= m;
    min_y -= m;
    max_x += m;
    max_y += m;
  }
};

class SvgWriter {
 public:
  SvgWriter(const Bounds& bounds, double width_px)
      : bounds_(bounds),
        scale_(width_px / std::max(1e-6, bounds.max_x - bounds.min_x)),
        width_px_(width_px),
        height_px_(scale_ * std::max(1e-6, bounds.max_y - bounds.min_y)) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" "
                  "height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                  width_px_, height_px_, width_px_, height_px_);
    out_ << buf << "<rect width=\"100%\" height=\"100%\" fill=\"#fafafa\"/>\n";
  }

  // World to pixel, with y flipped for the SVG frame.
  std::pair<double, double> map(const Vec2& p) const {
    return {(p.x - bounds_.min_x) * scale_, (bounds_.max_y - p.y) * scale_};
  }

  void polygon(const std::vector<Vec2>& pts, const std::string& fill,
               const std::string& stroke, double stroke_width, double opacity = 1.0) {
    out_ << "<polygon points=\"";
    append_points(pts);
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "\" fill=\"%s\" stroke=\"%s\" stroke-width=\"%.2f\" "
                  "opacity=\"%.2f\"/>\n",
                  fill.c_str(), stroke.c_str(), stroke_width, opacity);
    out_ << buf;
  }

  void polyline(const std::vector<Vec2>& pts, const std::string& stroke,
                double stroke_width, bool dashed = false, double opacity = 1.0) {
    out_ << "<polyline points=\"";
    append_points(pts);
    char buf[220];
    std::snprintf(buf, sizeof(buf),
                  "\" fill=\"none\" stroke=\"%s\" stroke-width=\"%.2f\"%s "
                  "opacity=\"%.2f\"/>\n",
                  stroke.c_str(), stroke_width, dashed ? " stroke-dasharray=\"6,4\"" : "",
                  opacity);
    out_ << buf;
  }

  void box(const Obb& obb, const std::string& fill, double opacity = 1.0) {
    const auto corners = obb.corners();
    polygon({corners.begin(), corners.end()}, fill, "#333333", 1.0, opacity);
  }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  void append_points(const std::vector<Vec2>& pts) {
    char buf[64];
    for (const Vec2& p : pts) {
      const auto [x, y] = map(p);
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", x, y);
      out_ << buf;
    }
  }

  Bounds bounds_;
  double scale_;
  double width_px_;
  double height_px_;
  std::ostringstream out_;
};

Bounds scenario_bounds(const Scenario& scenario) {
  Bounds b;
  for (const Lane& lane : scenario.lanes) {
    for (const Vec2& p : lane.left_boundary) b.add(p);
    for (const Vec2& p : lane.right_boundary) b.add(p);
  }
  b.add(scenario.av.current().pose.position());
  for (const AgentTrack& agent : scenario.agents)
    b.add(agent.current().pose.position());
  for (const StaticObstacle& obs : scenario.obstacles) b.add(obs.pose.position());
  b.pad(8.0);
  return b;
}

std::string light_tint(LightStatus status) {
  switch (status) {
    case LightStatus::kGreen: return "#d8f0d8";
    case LightStatus::kYellow: return "#f5eed0";
    case LightStatus::kRed: return "#f3d9d9";
    case LightStatus::kUnknown: return "#e8e8e8";
  }
  return "#e8e8e8";
}

void draw_scenario_base(SvgWriter& svg, const Scenario& scenario) {
  for (const Lane& lane : scenario.lanes) {
    std::vector<Vec2> ring = lane.left_boundary;
    ring.insert(ring.end(), lane.right_boundary.rbegin(), lane.right_boundary.rend());
    const bool on_route = scenario.route_lane_ids.count(lane.id) > 0;
    std::string fill = light_tint(lane.traffic_light);
    if (on_route && lane.traffic_light == LightStatus::kUnknown) fill = "#dbe7f3";
    svg.polygon(ring, fill, "#b0b0b0", 0.8);
  }

  for (const ReferenceLine& ref : find_reference_lines(scenario))
    svg.polyline(ref.points, "#8a2be2", 1.2, /*dashed=*/true, 0.9);

  for (const StaticObstacle& obs : scenario.obstacles)
    svg.box(obs.obb(), "#555555", 0.9);
  for (const AgentTrack& agent : scenario.agents)
    if (agent.current().valid) svg.box(agent.current_obb(), "#4d7fbe", 0.9);

  if (!scenario.av.future_gt.empty())
    svg.polyline(scenario.av.future_gt, "#2e8b57", 1.4, /*dashed=*/true, 0.9);
  svg.box(scenario.av.current_obb(), "#e8803a", 1.0);
}

std::vector<Vec2> trajectory_points(const Trajectory& traj) {
  std::vector<Vec2> out;
  out.reserve(traj.size());
  for (const TrajectoryPoint& p : traj.points) out.push_back(p.position());
  return out;
}

}  // namespace

std::string render_scenario_svg(const Scenario& scenario, const PlanResult* plan) {
  SvgWriter svg(scenario_bounds(scenario), 1000.0);
  draw_scenario_base(svg, scenario);
  if (plan) {
    svg.polyline(trajectory_points(plan->trajectory), "#c33131", 2.0, false, 1.0);
  }
  return svg.finish();
}

std::string render_simlog_svg(const SimLog& log, const Scenario* scenario,
                              int snapshot_interval) {
  Bounds b;
  if (scenario) b = scenario_bounds(*scenario);
  b.add(log.initial_av.position());
  for (const SimTick& t : log.ticks) b.add(t.av.position());
  b.pad(4.0);

  SvgWriter svg(b, 1000.0);
  if (scenario) draw_scenario_base(svg, *scenario);

  std::vector<Vec2> path = {log.initial_av.position()};
  for (const SimTick& t : log.ticks) path.push_back(t.av.position());
  svg.polyline(path, "#c33131", 2.0, false, 1.0);

  for (std::size_t i = 0; i < log.ticks.size();
       i += static_cast<std::size_t>(std::max(1, snapshot_interval))) {
    const SimTick& t = log.ticks[i];
    svg.box({{t.av.x, t.av.y, t.av.heading}, log.av_box.length, log.av_box.width},
            "#e8803a", 0.45);
    for (const AgentSnapshot& a : t.agents)
      if (a.valid) svg.box({a.pose, a.box.length, a.box.width}, "#4d7fbe", 0.35);
  }
  if (!log.ticks.empty()) {
    const SimTick& t = log.ticks.back();
    svg.box({{t.av.x, t.av.y, t.av.heading}, log.av_box.length, log.av_box.width},
            "#e8803a", 1.0);
    for (const AgentSnapshot& a : t.agents)
      if (a.valid) svg.box({a.pose, a.box.length, a.box.width}, "#4d7fbe", 0.9);
  }
  return svg.finish();
}

std::string esdf_to_pgm(const Esdf& field) {
  std::ostringstream out;
  out << "P2\n" << field.spec.width << " " << field.spec.height << "\n255\n";
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : field.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = std::max(1e-9, hi - lo);
  for (int r = 0; r < field.spec.height; ++r) {
    for (int c = 0; c < field.spec.width; ++c) {
      const int gray =
          static_cast<int>(std::lround((field.at(r, c) - lo) / span * 255.0));
      out << gray << (c + 1 == field.spec.width ? "" : " ");
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace plankit
