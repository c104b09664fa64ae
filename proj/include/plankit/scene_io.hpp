#pragma once

#include <string>

#include "plankit/scene.hpp"

namespace plankit {

// Scenario document schema: see docs/scenario_schema.md. Loading validates
// both the schema and the scenario invariants; failures throw ParseError /
// ValidationError naming the offending field.
Scenario load_scenario(const std::string& bytes);
std::string save_scenario(const Scenario& scenario);

Scenario load_scenario_file(const std::string& path);
void save_scenario_file(const Scenario& scenario, const std::string& path);

}  // namespace plankit
