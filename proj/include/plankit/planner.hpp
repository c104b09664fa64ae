#pragma once

#include <string>
#include <vector>

#include "plankit/postprocess.hpp"

namespace plankit {

struct PlannerConfig {
  ReferenceLineParams reference_lines;
  ProposerParams proposer;
  LqrParams lqr;
  VehicleParams vehicle;
  MetricThresholds thresholds;
  int top_k = 20;
  double alpha = 0.3;  // weight of the confidence score in the final ranking
};

struct PlanResult {
  Trajectory trajectory;
  Selection selection;
  std::size_t num_reference_lines = 0;
  std::size_t num_candidates = 0;
  std::size_t num_excluded = 0;
  // Per-candidate diagnostics, aligned with the evaluated candidate order.
  std::vector<double> rule_scores;
  std::vector<double> confidences;
  std::vector<int> flat_indices;
  std::vector<std::string> exclusion_reasons;
};

// The full selection pipeline: reference lines -> proposal grid -> top-K ->
// forward simulation -> rule evaluation -> score fusion. With no reference
// lines the free head is returned directly.
class Planner {
 public:
  explicit Planner(const PlannerConfig& config = {})
      : config_(config), tracker_(config.lqr, config.vehicle) {}

  PlanResult plan(const Scenario& observation) const;

  const PlannerConfig& config() const { return config_; }

 private:
  PlannerConfig config_;
  LqrTracker tracker_;
};

}  // namespace plankit
