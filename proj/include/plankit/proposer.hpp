#pragma once

#include <optional>
#include <vector>

#include "plankit/lane_graph.hpp"
#include "plankit/scene.hpp"
#include "plankit/trajectory.hpp"

namespace plankit {

struct IdmParams {
  double max_accel = 1.5;      // a_max
  double comfort_decel = 2.0;  // b
  double min_gap = 2.0;        // s0
  double time_headway = 1.5;   // T
  double max_decel = 4.0;      // b_max, emergency bound
};

// Car-following acceleration; pass +inf gap for free road. Nonpositive gap
// returns the emergency bound. Output clamped to [-max_decel, max_accel].
double idm_acceleration(double speed, double desired_speed, double gap,
                        double closing_speed, const IdmParams& params = {});

// Proposal grid over reference lines (rows) and longitudinal modes (cols),
// plus the reference-free fallback trajectory and per-agent predictions.
struct ProposalSet {
  std::vector<std::vector<Trajectory>> trajectories;  // N_R x N_L
  std::vector<double> confidences;                    // flattened, sums to 1
  Trajectory free;
  std::vector<std::vector<Vec2>> predictions;  // N_A x T_F

  std::size_t num_refs() const { return trajectories.size(); }
  std::size_t num_lon() const {
    return trajectories.empty() ? 0 : trajectories.front().size();
  }
};

struct ProposerParams {
  int num_lon = 12;  // N_L
  int horizon_steps = 80;
  double dt = 0.1;
  double lateral_blend_distance = 30.0;
  double planner_min_gap = 3.0;  // enlarged IDM s0 used for proposals
  IdmParams idm;
};

// Constant-velocity, constant-heading extrapolation; invalid current frames
// hold the last observed state.
std::vector<std::vector<Vec2>> predict_agents(const Scenario& scenario,
                                              int horizon_steps = 80, double dt = 0.1);

// For each reference line: a quintic lateral blend from the AV's offset onto
// the centerline, combined with num_lon longitudinal profiles (num_lon - 1
// IDM roll-ins toward evenly spaced stopping arclengths plus one free-flow
// profile). All profiles respect red/yellow stop lines on the line's lanes
// and the nearest predicted leader. Confidences are a softmax over a
// progress-minus-discomfort utility.
ProposalSet generate_proposals(const Scenario& scenario,
                               const std::vector<ReferenceLine>& refs,
                               const ProposerParams& params = {});

}  // namespace plankit
