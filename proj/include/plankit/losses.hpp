#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "plankit/costmap.hpp"
#include "plankit/lane_graph.hpp"
#include "plankit/trajectory.hpp"

namespace plankit {

// Vehicle footprint approximated by circles at signed longitudinal offsets
// from the trajectory point along its heading.
struct CoveringCircleModel {
  std::vector<double> offsets = {-1.2, 0.0, 1.2};  // meters
  double radius = 1.1;                             // R_c
  double epsilon = 0.1;                            // safety threshold
};

struct LossWeights {
  double imitation = 1.0;
  double prediction = 1.0;
  double auxiliary = 1.0;
  double contrastive = 1.0;
};

// d(loss)/d(point channels), same layout as TrajectoryPoint.
struct TrajectoryGradient {
  std::vector<std::array<double, 6>> rows;
};

struct AuxLossResult {
  double loss = 0.0;
  TrajectoryGradient grad;
};

std::vector<std::vector<Vec2>> covering_circle_centers(const Trajectory& traj,
                                                       const CoveringCircleModel& model);

// Hinge penalty max(0, R_c + eps - d) per circle, summed over active terms
// and divided by (active count + 1e-6). Set `per_step_normalization` to
// divide by the trajectory length instead.
AuxLossResult drivable_area_loss(const Trajectory& traj, const Esdf& field,
                                 const CoveringCircleModel& model,
                                 bool per_step_normalization = false);

// Same contract over an obstacle-variant field.
AuxLossResult collision_loss(const Trajectory& traj, const Esdf& obstacle_field,
                             const CoveringCircleModel& model,
                             bool per_step_normalization = false);

struct TargetAssignment {
  std::size_t ref_index = 0;
  int lon_index = 0;
};

// Teacher-forcing slot of a ground-truth endpoint: nearest-lateral reference
// line, and the longitudinal segment (of n_lon - 1 equal splits) containing
// the projected endpoint; projections at or beyond the line end map to
// n_lon - 1. Returns nullopt for empty refs (free-head supervision path).
std::optional<TargetAssignment> assign_target(const std::vector<Vec2>& gt_positions,
                                              const std::vector<ReferenceLine>& refs,
                                              int n_lon);

double smooth_l1(double error, double delta = 1.0);

// smoothL1(target_proposal, gt) + smoothL1(free, gt) + crossEntropy(scores).
// Scores are logits over the flattened ref x lon grid.
double imitation_loss(const std::vector<std::vector<Trajectory>>& proposals,
                      const std::vector<double>& score_logits, const Trajectory& free,
                      const Trajectory& gt, const TargetAssignment& target);

// Masked mean smooth-L1 over valid agent-timesteps; 0 when nothing is valid.
double prediction_loss(const std::vector<std::vector<Vec2>>& pred,
                       const std::vector<std::vector<Vec2>>& gt,
                       const std::vector<std::vector<bool>>& valid_mask);

struct ContrastiveResult {
  double loss = 0.0;
  std::vector<double> grad_z;
  std::vector<double> grad_pos;
  std::vector<double> grad_neg;
};

// Softmax triplet loss over cosine similarities with temperature sigma.
ContrastiveResult contrastive_loss(const std::vector<double>& z,
                                   const std::vector<double>& z_pos,
                                   const std::vector<double>& z_neg, double sigma = 0.1);

double total_loss(double imitation, double prediction, double auxiliary,
                  double contrastive, const LossWeights& w = {});

}  // namespace plankit
