#pragma once

#include <map>
#include <string>
#include <vector>

#include "plankit/augment.hpp"
#include "plankit/losses.hpp"
#include "plankit/planner.hpp"
#include "plankit/scenario_gen.hpp"

namespace plankit {

// Every tunable in one layered document. Keys are dotted paths
// ("costmap.resolution"); unknown keys are rejected. Defaults are documented
// with their origin in docs/config.md.
struct Config {
  PlannerConfig planner;
  AugmentParams augment;
  GeneratorParams generator;
  GridSpec grid;                  // origin is set at use sites (AV pose)
  CoveringCircleModel circles;
  double contrastive_sigma = 0.1;
  LossWeights loss_weights;

  // Flat key-value view used by the layering machinery.
  std::map<std::string, double> to_flat() const;
  void apply(const std::string& dotted_key, double value);
};

// file < environment < flags, last writer wins.
struct ConfigOverrides {
  std::string file_path;                          // optional JSON file
  std::vector<std::pair<std::string, double>> env_overrides;
  std::vector<std::pair<std::string, double>> flag_overrides;
};

// Environment variables PLANKIT_SECTION__KEY=value map to "section.key"
// (double underscore separates path components).
std::vector<std::pair<std::string, double>> config_overrides_from_env(
    char** environ_ptr);

Config load_config(const ConfigOverrides& overrides);
std::string config_to_json(const Config& config);

}  // namespace plankit
