#include "plankit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace plankit {

namespace {

Obb av_obb(const EpisodeTrace& trace, std::size_t tick) {
  const BicycleState& s = trace.av_states[tick];
  return {{s.x, s.y, s.heading}, trace.av_box.length, trace.av_box.width};
}

Obb agent_obb(const AgentSnapshot& snap) {
  return {snap.pose, snap.box.length, snap.box.width};
}

// 5-tap moving average; ends keep shrinking windows.
std::vector<double> smooth5(const std::vector<double>& x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t lo = i >= 2 ? i - 2 : 0;
    const std::size_t hi = std::min(i + 2, x.size() - 1);
    double sum = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) sum += x[k];
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

std::vector<double> central_diff(const std::vector<double>& x, double dt) {
  std::vector<double> out(x.size(), 0.0);
  if (x.size() < 2) return out;
  for (std::size_t i = 1; i + 1 < x.size(); ++i)
    out[i] = (x[i + 1] - x[i - 1]) / (2.0 * dt);
  out[0] = (x[1] - x[0]) / dt;
  out[x.size() - 1] = (x[x.size() - 1] - x[x.size() - 2]) / dt;
  return out;
}

}  // namespace

CollisionResult at_fault_collision(const EpisodeTrace& trace,
                                   const std::vector<StaticObstacle>& obstacles,
                                   const DrivableMap& drivable,
                                   const MetricThresholds& thresholds) {
  CollisionResult result;
  for (std::size_t t = 0; t < trace.av_states.size(); ++t) {
    const Obb av = av_obb(trace, t);
    const BicycleState& state = trace.av_states[t];
    const bool stationary = state.speed < thresholds.stationary_speed;
    const bool in_lane = drivable.contains(state.position());

    auto classify = [&](const Vec2& other_center, int agent_idx, int obstacle_idx) {
      const Vec2 local = av.pose.to_local(other_center);
      const bool rear = local.x < 0.0;
      const bool exempt = stationary || (rear && in_lane);
      if (!result.first)
        result.first = CollisionRecord{t, agent_idx, obstacle_idx, rear};
      if (!exempt) {
        result.at_fault = true;
        result.first = CollisionRecord{t, agent_idx, obstacle_idx, rear};
      }
    };

    for (std::size_t a = 0; a < trace.agents.size() && !result.at_fault; ++a) {
      const AgentSnapshot& snap = trace.agents[a][t];
      if (!snap.valid) continue;
      if (obb_overlap(av, agent_obb(snap)))
        classify(snap.pose.position(), static_cast<int>(a), -1);
    }
    for (std::size_t o = 0; o < obstacles.size() && !result.at_fault; ++o) {
      if (obb_overlap(av, obstacles[o].obb()))
        classify(obstacles[o].pose.position(), -1, static_cast<int>(o));
    }
    if (result.at_fault) break;
  }
  return result;
}

bool ttc_within_bound(const EpisodeTrace& trace, const MetricThresholds& thresholds) {
  const int steps = static_cast<int>(std::round(thresholds.ttc_horizon / thresholds.ttc_step));
  for (std::size_t t = 0; t < trace.av_states.size(); ++t) {
    const BicycleState& state = trace.av_states[t];
    const Vec2 av_vel = state.velocity();
    Obb av = av_obb(trace, t);

    for (std::size_t a = 0; a < trace.agents.size(); ++a) {
      const AgentSnapshot& snap = trace.agents[a][t];
      if (!snap.valid) continue;
      // Reachability prefilter over the whole window.
      const double closing =
          (av_vel - snap.velocity).norm() * thresholds.ttc_horizon +
          av.bounding_radius() + agent_obb(snap).bounding_radius();
      const double dist = (snap.pose.position() - state.position()).norm();
      if (dist > closing) continue;

      Obb agent = agent_obb(snap);
      for (int k = 1; k <= steps; ++k) {
        const double tau = k * thresholds.ttc_step;
        Obb av_k = av;
        av_k.pose.x += av_vel.x * tau;
        av_k.pose.y += av_vel.y * tau;
        Obb agent_k = agent;
        agent_k.pose.x += snap.velocity.x * tau;
        agent_k.pose.y += snap.velocity.y * tau;
        if (obb_overlap(av_k, agent_k)) {
          if (tau < thresholds.ttc_bound) return false;
          break;  // first overlap for this pair
        }
      }
    }
  }
  return true;
}

bool drivable_compliance(const EpisodeTrace& trace, const DrivableMap& drivable,
                         const MetricThresholds& thresholds) {
  if (drivable.empty()) return false;
  for (std::size_t t = 0; t < trace.av_states.size(); ++t) {
    for (const Vec2& corner : av_obb(trace, t).corners())
      if (drivable.outside_distance(corner) > thresholds.drivable_tolerance)
        return false;
  }
  return true;
}

double driving_direction(const EpisodeTrace& trace, const DrivableMap& drivable,
                         const MetricThresholds& thresholds) {
  if (trace.av_states.size() < 2 || drivable.empty()) return 1.0;
  std::vector<double> against(trace.av_states.size() - 1, 0.0);
  for (std::size_t t = 0; t + 1 < trace.av_states.size(); ++t) {
    const Vec2 a = trace.av_states[t].position();
    const Vec2 b = trace.av_states[t + 1].position();
    double lane_heading = 0.0;
    if (!drivable.nearest_lane_frame((a + b) * 0.5, &lane_heading, nullptr, nullptr))
      continue;
    const Vec2 tangent{std::cos(lane_heading), std::sin(lane_heading)};
    against[t] = std::max(0.0, -(b - a).dot(tangent));
  }
  const std::size_t window =
      std::max<std::size_t>(1, static_cast<std::size_t>(
                                   std::round(thresholds.direction_window / trace.dt)));
  double worst = 0.0, running = 0.0;
  for (std::size_t t = 0; t < against.size(); ++t) {
    running += against[t];
    if (t >= window) running -= against[t - window];
    worst = std::max(worst, running);
  }
  if (worst < thresholds.direction_minor) return 1.0;
  if (worst < thresholds.direction_major) return 0.5;
  return 0.0;
}

bool comfort(const EpisodeTrace& trace, const MetricThresholds& thresholds) {
  const std::size_t n = trace.av_states.size();
  if (n < 3) return true;
  const double dt = trace.dt;

  std::vector<double> speed(n), heading(n), vx(n), vy(n);
  double unwrapped = trace.av_states[0].heading;
  for (std::size_t i = 0; i < n; ++i) {
    speed[i] = trace.av_states[i].speed;
    if (i > 0)
      unwrapped += normalize_angle(trace.av_states[i].heading -
                                   trace.av_states[i - 1].heading);
    heading[i] = unwrapped;
    const Vec2 v = trace.av_states[i].velocity();
    vx[i] = v.x;
    vy[i] = v.y;
  }

  const std::vector<double> a_lon = central_diff(smooth5(speed), dt);
  const std::vector<double> jerk_lon = central_diff(a_lon, dt);
  const std::vector<double> yaw_rate = central_diff(smooth5(heading), dt);
  const std::vector<double> yaw_accel = central_diff(yaw_rate, dt);
  const std::vector<double> ax = central_diff(smooth5(vx), dt);
  const std::vector<double> ay = central_diff(smooth5(vy), dt);
  const std::vector<double> jx = central_diff(ax, dt);
  const std::vector<double> jy = central_diff(ay, dt);

  for (std::size_t i = 0; i < n; ++i) {
    if (a_lon[i] > thresholds.max_lon_accel || a_lon[i] < thresholds.min_lon_accel)
      return false;
    if (std::abs(speed[i] * yaw_rate[i]) > thresholds.max_lat_accel) return false;
    if (std::abs(jerk_lon[i]) > thresholds.max_lon_jerk) return false;
    if (std::hypot(jx[i], jy[i]) > thresholds.max_jerk) return false;
    if (std::abs(yaw_rate[i]) > thresholds.max_yaw_rate) return false;
    if (std::abs(yaw_accel[i]) > thresholds.max_yaw_accel) return false;
  }
  return true;
}

double route_projected_distance(const std::vector<Vec2>& positions,
                                const ReferenceLine& route) {
  if (positions.empty()) return 0.0;
  const double s0 = project(route, positions.front()).s;
  const double s1 = project(route, positions.back()).s;
  return std::max(0.0, s1 - s0);
}

double progress_ratio(const EpisodeTrace& trace, const ReferenceLine& route,
                      double expert_distance, const MetricThresholds& thresholds) {
  if (expert_distance < thresholds.min_expert_progress) return 1.0;
  std::vector<Vec2> positions;
  positions.reserve(trace.av_states.size());
  for (const BicycleState& s : trace.av_states) positions.push_back(s.position());
  const double covered = route_projected_distance(positions, route);
  return std::clamp(covered / expert_distance, 0.0, 1.0);
}

double speed_compliance(const EpisodeTrace& trace, const DrivableMap& drivable,
                        const MetricThresholds& thresholds) {
  if (trace.av_states.empty() || drivable.empty()) return 1.0;
  double overspeed_sum = 0.0;
  for (const BicycleState& s : trace.av_states) {
    double limit = 0.0;
    if (!drivable.nearest_lane_frame(s.position(), nullptr, nullptr, &limit)) continue;
    overspeed_sum += std::max(0.0, s.speed - limit);
  }
  const double mean = overspeed_sum / static_cast<double>(trace.av_states.size());
  return std::clamp(1.0 - mean / thresholds.overspeed_norm, 0.0, 1.0);
}

double aggregate_score(const MetricReport& r) {
  const double multiplier =
      r.no_at_fault_collision * r.drivable_compliance * r.driving_direction;
  const double weighted = (5.0 * r.ttc_within_bound + 5.0 * r.progress +
                           4.0 * r.speed_compliance + 2.0 * r.comfort) /
                          16.0;
  return multiplier * weighted;
}

MetricReport evaluate_episode(const EpisodeTrace& trace, const Scenario& scenario,
                              const MetricThresholds& thresholds) {
  const DrivableMap drivable(scenario);
  MetricReport report;
  report.no_at_fault_collision =
      at_fault_collision(trace, scenario.obstacles, drivable, thresholds).at_fault ? 0.0
                                                                                   : 1.0;
  report.ttc_within_bound = ttc_within_bound(trace, thresholds) ? 1.0 : 0.0;
  report.drivable_compliance =
      drivable_compliance(trace, drivable, thresholds) ? 1.0 : 0.0;
  report.driving_direction = driving_direction(trace, drivable, thresholds);
  report.comfort = comfort(trace, thresholds) ? 1.0 : 0.0;

  const std::optional<ReferenceLine> route = route_reference_line(scenario);
  if (route && !scenario.av.future_gt.empty()) {
    const double expert = route_projected_distance(scenario.av.future_gt, *route);
    report.progress = progress_ratio(trace, *route, expert, thresholds);
  } else {
    report.progress = 1.0;
  }
  report.speed_compliance = speed_compliance(trace, drivable, thresholds);
  report.aggregate = aggregate_score(report);
  return report;
}

std::string metric_report_to_json(const MetricReport& r) {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed;
  out << "{\"no_at_fault_collision\":" << r.no_at_fault_collision
      << ",\"ttc_within_bound\":" << r.ttc_within_bound
      << ",\"drivable_compliance\":" << r.drivable_compliance
      << ",\"driving_direction\":" << r.driving_direction
      << ",\"comfort\":" << r.comfort << ",\"progress\":" << r.progress
      << ",\"speed_compliance\":" << r.speed_compliance
      << ",\"aggregate\":" << r.aggregate << "}";
  return out.str();
}

}  // namespace plankit
