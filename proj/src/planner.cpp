#include "plankit/planner.hpp"

namespace plankit {

PlanResult Planner::plan(const Scenario& observation) const {
  PlanResult result;

  const AgentState& av = observation.av.current();
  const BicycleState y0{av.pose.x, av.pose.y, av.pose.heading, av.velocity.norm()};

  const std::vector<ReferenceLine> refs =
      find_reference_lines(observation, config_.reference_lines);
  result.num_reference_lines = refs.size();

  const ProposalSet proposals =
      generate_proposals(observation, refs, config_.proposer);

  if (proposals.trajectories.empty()) {
    result.trajectory = proposals.free;
    result.selection.trajectory = proposals.free;
    result.selection.flat_index = -1;
    return result;
  }

  const CandidateSet candidates = topk(proposals, config_.top_k);
  result.num_candidates = candidates.items.size();

  std::vector<Rollout> rollouts;
  rollouts.reserve(candidates.items.size());
  for (const Candidate& c : candidates.items)
    rollouts.push_back(forward_simulate(y0, c.trajectory,
                                        config_.proposer.horizon_steps, tracker_,
                                        config_.vehicle));

  const std::vector<RolloutScore> scores =
      evaluate_rollouts(rollouts, proposals.predictions, observation,
                        config_.thresholds);

  result.rule_scores.reserve(scores.size());
  result.confidences.reserve(scores.size());
  result.flat_indices.reserve(scores.size());
  result.exclusion_reasons.resize(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    result.rule_scores.push_back(scores[i].rule_score);
    result.confidences.push_back(candidates.items[i].confidence);
    result.flat_indices.push_back(static_cast<int>(candidates.items[i].flat_index));
    if (scores[i].excluded) {
      ++result.num_excluded;
      result.exclusion_reasons[i] = scores[i].exclusion_reason;
    }
  }

  result.selection = select(candidates, scores, config_.alpha, y0,
                            config_.proposer.dt, config_.vehicle.max_decel);
  result.trajectory = result.selection.trajectory;
  return result;
}

}  // namespace plankit
