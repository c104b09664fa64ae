#include "plankit/proposer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace plankit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double idm_acceleration(double speed, double desired_speed, double gap,
                        double closing_speed, const IdmParams& params) {
  if (gap <= 0.0) return -params.max_decel;
  double accel = params.max_accel;
  const double free_term = std::pow(speed / std::max(0.1, desired_speed), 4.0);
  if (gap == kInf) {
    accel = params.max_accel * (1.0 - free_term);
  } else {
    const double s_star =
        params.min_gap + speed * params.time_headway +
        speed * closing_speed /
            (2.0 * std::sqrt(params.max_accel * params.comfort_decel));
    const double interaction = (s_star / gap) * (s_star / gap);
    accel = params.max_accel * (1.0 - free_term - interaction);
  }
  return std::clamp(accel, -params.max_decel, params.max_accel);
}

std::vector<std::vector<Vec2>> predict_agents(const Scenario& scenario,
                                              int horizon_steps, double dt) {
  std::vector<std::vector<Vec2>> out;
  out.reserve(scenario.agents.size());
  for (const AgentTrack& agent : scenario.agents) {
    // Hold the last observed frame when the current one is missing.
    const AgentState* anchor = &agent.current();
    if (!anchor->valid) {
      for (auto it = agent.history.rbegin(); it != agent.history.rend(); ++it)
        if (it->valid) {
          anchor = &*it;
          break;
        }
    }
    std::vector<Vec2> traj(static_cast<std::size_t>(horizon_steps));
    for (int t = 0; t < horizon_steps; ++t)
      traj[static_cast<std::size_t>(t)] =
          anchor->pose.position() + anchor->velocity * (dt * (t + 1));
    out.push_back(std::move(traj));
  }
  return out;
}

namespace {

struct Leader {
  double station = 0.0;        // center station on the reference line at t=0
  double speed_along = 0.0;    // signed speed along the line
  double half_length = 0.0;
};

// Longitudinal IDM rollout; every profile respects all leaders plus an
// optional stopping target (a virtual zero-length stationary leader placed
// so the vehicle center settles at the target).
struct LonProfile {
  std::vector<double> station;  // at (k+1) dt, center-based
  std::vector<double> speed;
  double mean_abs_accel = 0.0;
};

LonProfile roll_longitudinal(double s0, double v0, double v_des,
                             std::optional<double> stop_target, double av_half_length,
                             const std::vector<Leader>& leaders,
                             std::optional<double> stop_line, const ProposerParams& p) {
  IdmParams idm = p.idm;
  idm.min_gap = p.planner_min_gap;

  LonProfile out;
  out.station.reserve(static_cast<std::size_t>(p.horizon_steps));
  out.speed.reserve(static_cast<std::size_t>(p.horizon_steps));
  double s = s0, v = v0, accel_sum = 0.0;
  for (int t = 0; t < p.horizon_steps; ++t) {
    double a = idm_acceleration(v, v_des, kInf, 0.0, idm);
    if (stop_target) {
      // Center-based settle point: gap -> min_gap exactly at the target.
      const double gap = *stop_target + idm.min_gap - s;
      a = std::min(a, idm_acceleration(v, v_des, gap, v, idm));
    }
    if (stop_line) {
      const double gap = *stop_line - (s + av_half_length);
      a = std::min(a, idm_acceleration(v, v_des, gap, v, idm));
    }
    const double time = p.dt * t;
    for (const Leader& lead : leaders) {
      const double lead_center = lead.station + lead.speed_along * time;
      const double gap = lead_center - s - lead.half_length - av_half_length;
      a = std::min(a, idm_acceleration(v, v_des, gap, v - lead.speed_along, idm));
    }
    // Forward Euler matching the bicycle update: position advances with the
    // pre-update speed.
    s += v * p.dt;
    v = std::max(0.0, v + a * p.dt);
    accel_sum += std::abs(a);
    out.station.push_back(s);
    out.speed.push_back(v);
  }
  out.mean_abs_accel = accel_sum / static_cast<double>(p.horizon_steps);
  return out;
}

double quintic_fade(double u) {
  // 1 -> 0 with zero first/second derivatives at both ends.
  u = std::clamp(u, 0.0, 1.0);
  return 1.0 - (10.0 * u * u * u - 15.0 * u * u * u * u + 6.0 * u * u * u * u * u);
}

double quintic_fade_slope(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return -(30.0 * u * u - 60.0 * u * u * u + 30.0 * u * u * u * u);
}

Trajectory assemble(const ReferenceLine& ref, const LonProfile& lon, double s_av,
                    double d0, double blend) {
  Trajectory traj;
  traj.points.resize(lon.station.size());
  for (std::size_t k = 0; k < lon.station.size(); ++k) {
    const double s = lon.station[k];
    const double u = blend > 0.0 ? (s - s_av) / blend : 1.0;
    const double d = d0 * quintic_fade(u);
    const double dd_ds = blend > 0.0 ? d0 * quintic_fade_slope(u) / blend : 0.0;

    const Vec2 base = ref.point_at(s);
    const double ref_heading = ref.heading_at(s);
    const Vec2 normal{-std::sin(ref_heading), std::cos(ref_heading)};
    const double heading = normalize_angle(ref_heading + std::atan(dd_ds));

    TrajectoryPoint& pt = traj.points[k];
    const Vec2 pos = base + normal * d;
    pt.x = pos.x;
    pt.y = pos.y;
    pt.cos_h = std::cos(heading);
    pt.sin_h = std::sin(heading);
    pt.vx = lon.speed[k] * pt.cos_h;
    pt.vy = lon.speed[k] * pt.sin_h;
  }
  return traj;
}

Trajectory free_flow_extrapolation(const Scenario& scenario, const ProposerParams& p) {
  const AgentState& av = scenario.av.current();
  Trajectory traj;
  traj.points.resize(static_cast<std::size_t>(p.horizon_steps));
  const double heading = av.pose.heading;
  for (int k = 0; k < p.horizon_steps; ++k) {
    TrajectoryPoint& pt = traj.points[static_cast<std::size_t>(k)];
    const Vec2 pos = av.pose.position() + av.velocity * (p.dt * (k + 1));
    pt.x = pos.x;
    pt.y = pos.y;
    pt.cos_h = std::cos(heading);
    pt.sin_h = std::sin(heading);
    pt.vx = av.velocity.x;
    pt.vy = av.velocity.y;
  }
  return traj;
}

// Arclength where the first red/yellow lane of the path begins, if any.
std::optional<double> stop_line_station(const Scenario& scenario,
                                        const ReferenceLine& ref) {
  double offset = 0.0;
  for (const std::string& lane_id : ref.source_lane_ids) {
    const Lane* lane = scenario.find_lane(lane_id);
    if (!lane) continue;
    if (lane->traffic_light == LightStatus::kRed ||
        lane->traffic_light == LightStatus::kYellow) {
      if (offset <= ref.length()) return offset;
      return std::nullopt;
    }
    offset += polyline_length(lane->centerline);
  }
  return std::nullopt;
}

}  // namespace

ProposalSet generate_proposals(const Scenario& scenario,
                               const std::vector<ReferenceLine>& refs,
                               const ProposerParams& params) {
  if (params.num_lon < 2)
    throw std::invalid_argument("generate_proposals: num_lon must be >= 2");

  ProposalSet out;
  out.free = free_flow_extrapolation(scenario, params);
  out.predictions = predict_agents(scenario, params.horizon_steps, params.dt);
  if (refs.empty()) return out;

  const AgentState& av = scenario.av.current();
  const double av_speed = av.velocity.norm();
  const double av_half_length = 0.5 * av.box.length;
  const double corridor_halfwidth = 2.0;

  out.trajectories.resize(refs.size());
  std::vector<double> utilities;
  utilities.reserve(refs.size() * static_cast<std::size_t>(params.num_lon));

  for (std::size_t r = 0; r < refs.size(); ++r) {
    const ReferenceLine& ref = refs[r];
    const FrenetCoord av_sd = project(ref, av.pose.position());
    const double s_av = av_sd.s;
    const double d0 = av_sd.d;
    const double remaining = std::max(0.0, ref.length() - s_av);
    const double blend = std::min(params.lateral_blend_distance,
                                  std::max(1.0, 0.5 * ref.length()));
    const double alignment =
        std::cos(normalize_angle(ref.heading_at(s_av) - av.pose.heading));

    double v_des = kInf;
    for (const std::string& lane_id : ref.source_lane_ids)
      if (const Lane* lane = scenario.find_lane(lane_id))
        v_des = std::min(v_des, lane->speed_limit);
    if (v_des == kInf || v_des <= 0.0) v_des = 10.0;

    const std::optional<double> stop_line = stop_line_station(scenario, ref);

    std::vector<Leader> leaders;
    for (std::size_t a = 0; a < scenario.agents.size(); ++a) {
      const AgentState& st = scenario.agents[a].current();
      if (!st.valid) continue;
      const FrenetCoord sd = project(ref, st.pose.position());
      if (std::abs(sd.d) > corridor_halfwidth || sd.s <= s_av) continue;
      const double heading_at = ref.heading_at(sd.s);
      const double v_along =
          st.velocity.dot({std::cos(heading_at), std::sin(heading_at)});
      leaders.push_back({sd.s, v_along, 0.5 * st.box.length});
    }

    out.trajectories[r].reserve(static_cast<std::size_t>(params.num_lon));
    for (int j = 0; j < params.num_lon; ++j) {
      std::optional<double> stop_target;
      if (j < params.num_lon - 1) {
        const double frac =
            static_cast<double>(j + 1) / static_cast<double>(params.num_lon - 1);
        stop_target = s_av + frac * remaining;
      }
      const LonProfile lon = roll_longitudinal(s_av, av_speed, v_des, stop_target,
                                               av_half_length, leaders, stop_line,
                                               params);
      const double progress = lon.station.back() - s_av;
      double utility;
      if (alignment < 0.0) {
        utility = -50.0;  // wrong-way reference line
      } else {
        utility = progress / std::max(1.0, v_des * params.dt * params.horizon_steps) -
                  0.3 * lon.mean_abs_accel / params.idm.max_accel;
      }
      utilities.push_back(utility);
      out.trajectories[r].push_back(assemble(ref, lon, s_av, d0, blend));
    }
  }

  // Softmax (temperature 1) over the utilities.
  const double max_u = *std::max_element(utilities.begin(), utilities.end());
  double denom = 0.0;
  for (double u : utilities) denom += std::exp(u - max_u);
  out.confidences.resize(utilities.size());
  for (std::size_t i = 0; i < utilities.size(); ++i)
    out.confidences[i] = std::exp(utilities[i] - max_u) / denom;
  return out;
}

}  // namespace plankit
