#pragma once

#include <string>
#include <vector>

#include "plankit/control.hpp"
#include "plankit/metrics.hpp"
#include "plankit/proposer.hpp"

namespace plankit {

struct Candidate {
  Trajectory trajectory;
  double confidence = 0.0;   // pi_0 entry, untouched softmax mass
  std::size_t flat_index = 0;
};

struct CandidateSet {
  std::vector<Candidate> items;
};

// Highest-confidence k candidates from the flattened proposal grid; stable
// order by confidence, ties by lower flat index.
CandidateSet topk(const ProposalSet& proposals, int k);

struct Rollout {
  std::vector<BicycleState> states;  // n_steps + 1, states[0] = y0
  bool feasible = true;              // max deviation from the plan <= 1 m
  double max_deviation = 0.0;
};

// Closed-loop tracking of a candidate: lqr_track + bicycle_step per tick.
Rollout forward_simulate(const BicycleState& y0, const Trajectory& traj, int n_steps,
                         const LqrTracker& tracker, const VehicleParams& vehicle);

struct RolloutScore {
  double rule_score = 0.0;  // -inf when excluded
  bool excluded = false;
  std::string exclusion_reason;
  MetricReport components;
};

// Rule evaluation of simulated rollouts against constant-velocity agent
// predictions and the scenario context. At-fault collisions exclude the
// candidate; progress is normalized by the best candidate's distance.
std::vector<RolloutScore> evaluate_rollouts(
    const std::vector<Rollout>& rollouts,
    const std::vector<std::vector<Vec2>>& predictions, const Scenario& scenario,
    const MetricThresholds& thresholds = {});

struct Selection {
  Trajectory trajectory;
  int flat_index = -1;     // proposal grid index; -1 for the emergency stop
  int candidate_rank = -1; // index within the evaluated candidate list
  bool emergency_stop = false;
  double combined_score = 0.0;
};

// argmax(rule + alpha * confidence) over non-excluded candidates; the
// returned trajectory is the untouched proposal. When every candidate is
// excluded, a constant-deceleration stop along the current heading is
// returned with the emergency flag set.
Selection select(const CandidateSet& candidates, const std::vector<RolloutScore>& scores,
                 double alpha, const BicycleState& y0, double dt = 0.1,
                 double emergency_decel = 4.0);

Trajectory emergency_stop_trajectory(const BicycleState& y0, int n_steps, double dt,
                                     double decel);

}  // namespace plankit
