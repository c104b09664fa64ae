#include "plankit/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace plankit {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

CandidateSet topk(const ProposalSet& proposals, int k) {
  if (k < 1) throw std::invalid_argument("topk: k must be >= 1");
  CandidateSet out;
  std::vector<std::size_t> order(proposals.confidences.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (proposals.confidences[a] != proposals.confidences[b])
      return proposals.confidences[a] > proposals.confidences[b];
    return a < b;
  });

  const std::size_t n_lon = proposals.num_lon();
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
  out.items.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t flat = order[i];
    out.items.push_back({proposals.trajectories[flat / n_lon][flat % n_lon],
                         proposals.confidences[flat], flat});
  }
  return out;
}

Rollout forward_simulate(const BicycleState& y0, const Trajectory& traj, int n_steps,
                         const LqrTracker& tracker, const VehicleParams& vehicle) {
  Rollout out;
  out.states.reserve(static_cast<std::size_t>(n_steps) + 1);
  out.states.push_back(y0);
  BicycleState y = y0;
  for (int t = 1; t <= n_steps; ++t) {
    const ControlInput u = tracker.track(y, traj, t);
    y = bicycle_step(y, u, 0.1, vehicle.wheelbase);
    out.states.push_back(y);
    const std::size_t ref = std::min<std::size_t>(static_cast<std::size_t>(t) - 1,
                                                  traj.size() - 1);
    out.max_deviation = std::max(
        out.max_deviation, (y.position() - traj.points[ref].position()).norm());
  }
  out.feasible = out.max_deviation <= 1.0;
  return out;
}

namespace {

EpisodeTrace rollout_trace(const Rollout& rollout,
                           const std::vector<std::vector<Vec2>>& predictions,
                           const Scenario& scenario) {
  EpisodeTrace trace;
  trace.av_states = rollout.states;
  trace.av_box = scenario.av.current().box;
  trace.dt = scenario.dt;
  trace.agents.resize(scenario.agents.size());
  for (std::size_t a = 0; a < scenario.agents.size(); ++a) {
    const AgentState& cur = scenario.agents[a].current();
    std::vector<AgentSnapshot>& seq = trace.agents[a];
    seq.resize(rollout.states.size());
    seq[0] = {cur.pose, cur.velocity, cur.box, cur.valid};
    for (std::size_t t = 1; t < rollout.states.size(); ++t) {
      AgentSnapshot snap;
      const std::vector<Vec2>& pred = predictions[a];
      const Vec2 pos = t - 1 < pred.size() ? pred[t - 1]
                                           : (pred.empty() ? cur.pose.position()
                                                           : pred.back());
      snap.pose = {pos.x, pos.y, cur.pose.heading};
      snap.velocity = cur.velocity;
      snap.box = cur.box;
      snap.valid = cur.valid;
      seq[t] = snap;
    }
  }
  return trace;
}

}  // namespace

std::vector<RolloutScore> evaluate_rollouts(
    const std::vector<Rollout>& rollouts,
    const std::vector<std::vector<Vec2>>& predictions, const Scenario& scenario,
    const MetricThresholds& thresholds) {
  std::vector<RolloutScore> out(rollouts.size());
  if (rollouts.empty()) return out;

  const DrivableMap drivable(scenario);
  const std::optional<ReferenceLine> route = route_reference_line(scenario);

  // Raw progress first: the scored value is relative to the best candidate.
  std::vector<double> distances(rollouts.size(), 0.0);
  double best_distance = 0.0;
  for (std::size_t i = 0; i < rollouts.size(); ++i) {
    if (route) {
      std::vector<Vec2> positions;
      positions.reserve(rollouts[i].states.size());
      for (const BicycleState& s : rollouts[i].states) positions.push_back(s.position());
      distances[i] = route_projected_distance(positions, *route);
    }
    best_distance = std::max(best_distance, distances[i]);
  }

  for (std::size_t i = 0; i < rollouts.size(); ++i) {
    const EpisodeTrace trace = rollout_trace(rollouts[i], predictions, scenario);
    RolloutScore& score = out[i];

    const CollisionResult collision =
        at_fault_collision(trace, scenario.obstacles, drivable, thresholds);
    if (collision.at_fault) {
      score.excluded = true;
      score.rule_score = kNegInf;
      score.exclusion_reason =
          collision.first && collision.first->agent_index >= 0
              ? "at_fault_collision_agent_" + std::to_string(collision.first->agent_index)
              : "at_fault_collision_obstacle";
      continue;
    }

    MetricReport& r = score.components;
    r.no_at_fault_collision = 1.0;
    r.ttc_within_bound = ttc_within_bound(trace, thresholds) ? 1.0 : 0.0;
    r.drivable_compliance = drivable_compliance(trace, drivable, thresholds) ? 1.0 : 0.0;
    r.driving_direction = driving_direction(trace, drivable, thresholds);
    r.comfort = comfort(trace, thresholds) ? 1.0 : 0.0;
    r.progress = best_distance < 0.1 ? 1.0 : distances[i] / best_distance;
    r.speed_compliance = speed_compliance(trace, drivable, thresholds);
    r.aggregate = aggregate_score(r);
    score.rule_score = r.aggregate;
  }
  return out;
}

Trajectory emergency_stop_trajectory(const BicycleState& y0, int n_steps, double dt,
                                     double decel) {
  Trajectory traj;
  traj.points.resize(static_cast<std::size_t>(n_steps));
  double v = y0.speed;
  double s = 0.0;
  const double ch = std::cos(y0.heading), sh = std::sin(y0.heading);
  for (int k = 0; k < n_steps; ++k) {
    s += v * dt;
    v = std::max(0.0, v - decel * dt);
    TrajectoryPoint& pt = traj.points[static_cast<std::size_t>(k)];
    pt.x = y0.x + ch * s;
    pt.y = y0.y + sh * s;
    pt.cos_h = ch;
    pt.sin_h = sh;
    pt.vx = v * ch;
    pt.vy = v * sh;
  }
  return traj;
}

Selection select(const CandidateSet& candidates, const std::vector<RolloutScore>& scores,
                 double alpha, const BicycleState& y0, double dt,
                 double emergency_decel) {
  if (alpha < 0.0) throw std::invalid_argument("select: alpha must be >= 0");
  if (candidates.items.size() != scores.size())
    throw std::invalid_argument("select: candidate/score size mismatch");

  Selection sel;
  double best = kNegInf;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i].excluded) continue;
    const double combined = scores[i].rule_score + alpha * candidates.items[i].confidence;
    if (combined > best) {
      best = combined;
      sel.candidate_rank = static_cast<int>(i);
    }
  }

  if (sel.candidate_rank < 0) {
    sel.emergency_stop = true;
    sel.flat_index = -1;
    sel.combined_score = kNegInf;
    sel.trajectory = emergency_stop_trajectory(y0, 80, dt, emergency_decel);
    return sel;
  }

  const Candidate& chosen = candidates.items[static_cast<std::size_t>(sel.candidate_rank)];
  sel.trajectory = chosen.trajectory;  // selector, not optimizer
  sel.flat_index = static_cast<int>(chosen.flat_index);
  sel.combined_score = best;
  return sel;
}

}  // namespace plankit
