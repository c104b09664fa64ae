#include "plankit/augment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "plankit/lane_graph.hpp"

namespace plankit {

namespace {

// Box pose at a GT future step; heading follows the motion direction and
// falls back to the current heading when stationary.
Obb future_obb(const AgentTrack& track, std::size_t step) {
  const Vec2 pos = track.future_gt[step];
  const Vec2 prev =
      step > 0 ? track.future_gt[step - 1] : track.current().pose.position();
  const Vec2 delta = pos - prev;
  const double heading =
      delta.norm() > 1e-6 ? std::atan2(delta.y, delta.x) : track.current().pose.heading;
  return {{pos.x, pos.y, heading}, track.current().box.length,
          track.current().box.width};
}

// Agents in the front corridor of the AV's nearest reference line.
std::vector<std::size_t> leading_agent_indices(const Scenario& scenario,
                                               const AugmentParams& params,
                                               bool* has_reference) {
  const std::vector<ReferenceLine> refs = find_reference_lines(scenario);
  const Vec2 av_pos = scenario.av.current().pose.position();
  const std::optional<std::size_t> nearest = nearest_reference_line(refs, av_pos);
  if (has_reference) *has_reference = nearest.has_value();
  if (!nearest) return {};

  const ReferenceLine& ref = refs[*nearest];
  const double s_av = project(ref, av_pos).s;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
    const AgentState& cur = scenario.agents[i].current();
    if (!cur.valid) continue;
    const FrenetCoord sd = project(ref, cur.pose.position());
    const double ahead = sd.s - s_av;
    if (ahead > 0.0 && ahead <= params.corridor_ahead &&
        std::abs(sd.d) <= params.corridor_halfwidth)
      out.push_back(i);
  }
  return out;
}

void drop_agents(Scenario& scenario, const std::vector<std::size_t>& indices) {
  std::vector<AgentTrack> kept;
  kept.reserve(scenario.agents.size());
  for (std::size_t i = 0; i < scenario.agents.size(); ++i)
    if (std::find(indices.begin(), indices.end(), i) == indices.end())
      kept.push_back(std::move(scenario.agents[i]));
  scenario.agents = std::move(kept);
}

}  // namespace

std::set<std::string> detect_interactive_agents(const Scenario& scenario) {
  if (scenario.av.future_gt.empty())
    throw std::invalid_argument("detect_interactive_agents: AV future_gt required");

  std::set<std::string> out;
  const std::size_t steps = scenario.av.future_gt.size();
  for (const AgentTrack& agent : scenario.agents) {
    if (agent.future_gt.empty()) continue;  // treated as non-interactive
    const std::size_t common = std::min(steps, agent.future_gt.size());
    for (std::size_t t = 0; t < common; ++t) {
      const Obb av_box = future_obb(scenario.av, t);
      const Obb agent_box = future_obb(agent, t);
      if (obb_overlap(av_box, agent_box)) {
        out.insert(agent.id);
        break;
      }
    }
  }
  return out;
}

AugmentedSample state_perturbation(const Scenario& scenario, Rng& rng,
                                   const PerturbationMagnitudes& magnitudes) {
  AugmentedSample sample{scenario, Polarity::kPositive, true, "state_perturbation", 0};
  Scenario& s = sample.scenario;
  AgentState& cur = s.av.history.back();

  const double d_lon = rng.uniform(-magnitudes.longitudinal, magnitudes.longitudinal);
  const double d_lat = rng.uniform(-magnitudes.lateral, magnitudes.lateral);
  const double d_speed = rng.uniform(-magnitudes.speed, magnitudes.speed);
  const double d_accel = rng.uniform(-magnitudes.accel, magnitudes.accel);
  const double d_steer = rng.uniform(-magnitudes.steering, magnitudes.steering);

  const Vec2 offset = Vec2{d_lon, d_lat}.rotated(cur.pose.heading);
  cur.pose.x += offset.x;
  cur.pose.y += offset.y;

  const double speed = cur.velocity.norm();
  const Vec2 dir = speed > 1e-9 ? cur.velocity.normalized() : cur.pose.tangent();
  cur.velocity = dir * std::max(0.0, speed + d_speed);

  s.av_acceleration += d_accel;
  s.av_steering += d_steer;
  return sample;
}

AugmentedSample noninteractive_dropout(const Scenario& scenario, Rng& rng,
                                       double p_drop) {
  AugmentedSample sample{scenario, Polarity::kPositive, true, "noninteractive_dropout",
                         0};
  const std::set<std::string> interactive = detect_interactive_agents(scenario);
  std::vector<std::size_t> to_drop;
  for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
    if (interactive.count(scenario.agents[i].id)) continue;
    if (rng.bernoulli(p_drop)) to_drop.push_back(i);
  }
  drop_agents(sample.scenario, to_drop);
  return sample;
}

std::optional<AugmentedSample> leading_dropout(const Scenario& scenario,
                                               const AugmentParams& params) {
  bool has_reference = false;
  const std::vector<std::size_t> leading =
      leading_agent_indices(scenario, params, &has_reference);
  if (!has_reference || leading.empty()) return std::nullopt;

  AugmentedSample sample{scenario, Polarity::kNegative, false, "leading_dropout", 0};
  drop_agents(sample.scenario, leading);
  return sample;
}

std::optional<AugmentedSample> leading_insertion(const Scenario& scenario,
                                                 const AgentTrack& donor, Rng& rng,
                                                 const AugmentParams& params) {
  const std::vector<Vec2>& gt = scenario.av.future_gt;
  if (gt.size() < 2) return std::nullopt;
  const std::vector<double> s = cumulative_arclength(gt);
  if (s.back() < params.insertion_min_distance) return std::nullopt;

  const double distance = rng.uniform(params.insertion_min_distance,
                                      std::min(params.insertion_max_distance, s.back()));
  const Vec2 pos = polyline_interpolate(gt, s, distance);
  const Vec2 next = polyline_interpolate(gt, s, std::min(distance + 0.5, s.back()));
  const Vec2 tangent = (next - pos).norm() > 1e-9
                           ? (next - pos).normalized()
                           : scenario.av.current().pose.tangent();
  const double heading = std::atan2(tangent.y, tangent.x);

  AugmentedSample sample{scenario, Polarity::kNegative, false, "leading_insertion", 0};
  AgentTrack inserted;
  inserted.id = "inserted_" + donor.id;
  inserted.kind = donor.kind;
  AgentState state;
  state.pose = {pos.x, pos.y, heading};
  state.velocity = {0.0, 0.0};
  state.box = donor.current().box;
  state.valid = true;
  inserted.history.assign(scenario.av.history.size(), state);
  inserted.future_gt.assign(scenario.av.future_gt.size(), pos);
  sample.scenario.agents.push_back(std::move(inserted));
  return sample;
}

std::optional<AugmentedSample> interactive_dropout(const Scenario& scenario, Rng& rng) {
  const std::set<std::string> interactive = detect_interactive_agents(scenario);
  if (interactive.empty()) return std::nullopt;

  // Random nonempty subset.
  std::vector<std::string> ids(interactive.begin(), interactive.end());
  std::vector<std::string> chosen;
  for (const std::string& id : ids)
    if (rng.bernoulli(0.5)) chosen.push_back(id);
  if (chosen.empty()) chosen.push_back(ids[rng.uniform_index(ids.size())]);

  AugmentedSample sample{scenario, Polarity::kNegative, false, "interactive_dropout", 0};
  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < scenario.agents.size(); ++i)
    if (std::find(chosen.begin(), chosen.end(), scenario.agents[i].id) != chosen.end())
      indices.push_back(i);
  drop_agents(sample.scenario, indices);
  return sample;
}

std::optional<AugmentedSample> traffic_light_inversion(const Scenario& scenario,
                                                       const AugmentParams& params) {
  bool signalized = false;
  for (const Lane& lane : scenario.lanes)
    if (scenario.route_lane_ids.count(lane.id) &&
        (lane.traffic_light == LightStatus::kRed ||
         lane.traffic_light == LightStatus::kGreen))
      signalized = true;
  if (!signalized) return std::nullopt;

  bool has_reference = false;
  if (!leading_agent_indices(scenario, params, &has_reference).empty())
    return std::nullopt;  // only without a leading vehicle

  AugmentedSample sample{scenario, Polarity::kNegative, false, "traffic_light_inversion",
                         0};
  for (Lane& lane : sample.scenario.lanes) {
    if (!scenario.route_lane_ids.count(lane.id)) continue;
    if (lane.traffic_light == LightStatus::kRed)
      lane.traffic_light = LightStatus::kGreen;
    else if (lane.traffic_light == LightStatus::kGreen)
      lane.traffic_light = LightStatus::kRed;
  }
  return sample;
}

Triplet sample_triplet(const Scenario& scenario, std::uint64_t seed,
                       const AugmentParams& params) {
  Rng rng(seed);
  Triplet triplet{scenario, {}, {}};

  const int positive_pick = static_cast<int>(rng.uniform_index(2));
  triplet.positive = positive_pick == 0
                         ? state_perturbation(scenario, rng, params.perturbation)
                         : noninteractive_dropout(scenario, rng,
                                                  params.dropout_probability);
  triplet.positive.seed = seed;

  std::vector<int> negatives = {0, 1, 2, 3};
  while (!negatives.empty()) {
    const std::size_t pick = rng.uniform_index(negatives.size());
    const int which = negatives[pick];
    negatives.erase(negatives.begin() + static_cast<std::ptrdiff_t>(pick));

    std::optional<AugmentedSample> sample;
    switch (which) {
      case 0:
        sample = leading_dropout(scenario, params);
        break;
      case 1: {
        std::vector<std::size_t> donors;
        for (std::size_t i = 0; i < scenario.agents.size(); ++i)
          if (scenario.agents[i].current().valid) donors.push_back(i);
        if (!donors.empty())
          sample = leading_insertion(
              scenario, scenario.agents[donors[rng.uniform_index(donors.size())]], rng,
              params);
        break;
      }
      case 2:
        sample = interactive_dropout(scenario, rng);
        break;
      case 3:
        sample = traffic_light_inversion(scenario, params);
        break;
    }
    if (sample) {
      triplet.negative = std::move(*sample);
      triplet.negative.seed = seed;
      return triplet;
    }
  }
  throw std::runtime_error("sample_triplet: no negative augmentor applies");
}

std::vector<std::string> augmentor_names() {
  return {"state_perturbation", "noninteractive_dropout", "leading_dropout",
          "leading_insertion", "interactive_dropout", "traffic_light_inversion"};
}

std::optional<AugmentedSample> run_augmentor(const std::string& name,
                                             const Scenario& scenario, Rng& rng,
                                             const AugmentParams& params) {
  if (name == "state_perturbation")
    return state_perturbation(scenario, rng, params.perturbation);
  if (name == "noninteractive_dropout")
    return noninteractive_dropout(scenario, rng, params.dropout_probability);
  if (name == "leading_dropout") return leading_dropout(scenario, params);
  if (name == "leading_insertion") {
    std::vector<std::size_t> donors;
    for (std::size_t i = 0; i < scenario.agents.size(); ++i)
      if (scenario.agents[i].current().valid) donors.push_back(i);
    if (donors.empty()) return std::nullopt;
    return leading_insertion(scenario,
                             scenario.agents[donors[rng.uniform_index(donors.size())]],
                             rng, params);
  }
  if (name == "interactive_dropout") return interactive_dropout(scenario, rng);
  if (name == "traffic_light_inversion")
    return traffic_light_inversion(scenario, params);
  throw std::invalid_argument("unknown augmentor '" + name + "'");
}

}  // namespace plankit
