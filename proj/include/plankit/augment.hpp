#pragma once

#include <optional>
#include <set>
#include <string>

#include "plankit/scene.hpp"

namespace plankit {

enum class Polarity { kPositive, kNegative };

struct AugmentedSample {
  Scenario scenario;
  Polarity polarity = Polarity::kPositive;
  bool gt_valid = true;
  std::string augmentor;
  std::uint64_t seed = 0;
};

struct PerturbationMagnitudes {
  double longitudinal = 0.5;  // m
  double lateral = 0.3;       // m
  double speed = 0.5;         // m/s
  double accel = 0.5;         // m/s^2
  double steering = 0.05;     // rad
};

struct AugmentParams {
  PerturbationMagnitudes perturbation;
  double dropout_probability = 0.5;       // non-interactive agent dropout
  double corridor_ahead = 50.0;           // m, "leading" arclength window
  double corridor_halfwidth = 2.5;        // m
  double insertion_min_distance = 5.0;    // m along the GT path
  double insertion_max_distance = 30.0;
};

// Agents whose future box overlaps the AV's future box at the same timestep.
// Agents without a GT future are never interactive. Requires the AV future.
std::set<std::string> detect_interactive_agents(const Scenario& scenario);

// T+: uniform noise on the AV's current position (AV frame), speed,
// acceleration and steering; history untouched.
AugmentedSample state_perturbation(const Scenario& scenario, Rng& rng,
                                   const PerturbationMagnitudes& magnitudes = {});

// T+: drops each non-interactive agent independently.
AugmentedSample noninteractive_dropout(const Scenario& scenario, Rng& rng,
                                       double p_drop = 0.5);

// T-: removes every agent in the front corridor of the AV's nearest
// reference line; inapplicable when there is no reference line or the
// corridor is already empty.
std::optional<AugmentedSample> leading_dropout(const Scenario& scenario,
                                               const AugmentParams& params = {});

// T-: places the donor, stopped, onto the AV's GT path so the ground truth
// becomes colliding; inapplicable when the GT is shorter than the insertion
// window start.
std::optional<AugmentedSample> leading_insertion(const Scenario& scenario,
                                                 const AgentTrack& donor, Rng& rng,
                                                 const AugmentParams& params = {});

// T-: removes a random nonempty subset of the interactive agents.
std::optional<AugmentedSample> interactive_dropout(const Scenario& scenario, Rng& rng);

// T-: red <-> green on the route lanes; applicable only when some route lane
// is signalized red/green and the front corridor has no leading vehicle.
std::optional<AugmentedSample> traffic_light_inversion(const Scenario& scenario,
                                                       const AugmentParams& params = {});

struct Triplet {
  Scenario original;
  AugmentedSample positive;
  AugmentedSample negative;
};

// Uniformly samples one applicable positive and one applicable negative
// augmentor (resampling within the polarity set on inapplicability). Throws
// when no negative augmentor applies. Deterministic in the seed.
Triplet sample_triplet(const Scenario& scenario, std::uint64_t seed,
                       const AugmentParams& params = {});

// Names of augmentors usable with the CLI preview.
std::vector<std::string> augmentor_names();
std::optional<AugmentedSample> run_augmentor(const std::string& name,
                                             const Scenario& scenario, Rng& rng,
                                             const AugmentParams& params = {});

}  // namespace plankit
