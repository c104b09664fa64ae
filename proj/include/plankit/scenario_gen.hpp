#pragma once

#include <string>

#include "plankit/scene.hpp"

namespace plankit {

enum class ScenarioKind {
  kStraightCruise,
  kStoppedLead,
  kLaneBlocked,
  kRedLight,
  kUnprotectedLeft,
  kLaneChange,
};

struct GeneratorParams {
  double lane_width = 3.5;
  double junction_lane_width = 5.0;
  double point_spacing = 2.0;  // centerline sampling
  BoxDims av_box{4.6, 2.0};
  BoxDims vehicle_box{4.6, 2.0};
};

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& s);
std::vector<ScenarioKind> all_scenario_kinds();

// Deterministic parametric scenario with lanes, traffic lights, a route, and
// agents carrying GT futures; byte-identical JSON for a fixed seed.
Scenario generate_scenario(ScenarioKind kind, const GeneratorParams& params,
                           std::uint64_t seed);

}  // namespace plankit
