#pragma once

#include <optional>
#include <string>

#include "plankit/costmap.hpp"
#include "plankit/planner.hpp"
#include "plankit/simulator.hpp"

namespace plankit {

// Scenario snapshot: lanes (route shaded, lights tinted), reference lines
// dashed, agents and obstacles as boxes, the GT future dashed, and — when a
// plan is supplied — candidate proposals in gray with the selected
// trajectory highlighted. Output is byte-deterministic.
std::string render_scenario_svg(const Scenario& scenario,
                                const PlanResult* plan = nullptr);

// Episode render: base scenario plus the driven AV path and box snapshots
// every `snapshot_interval` ticks.
std::string render_simlog_svg(const SimLog& log, const Scenario* scenario = nullptr,
                              int snapshot_interval = 50);

// ASCII PGM dump of a cost-map field for debugging.
std::string esdf_to_pgm(const Esdf& field);

}  // namespace plankit
