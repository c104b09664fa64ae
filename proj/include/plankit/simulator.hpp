#pragma once

#include <functional>
#include <string>
#include <vector>

#include "plankit/planner.hpp"
#include "plankit/scenario_gen.hpp"

namespace plankit {

enum class AgentPolicy { kNonReactive, kReactive };

std::string to_string(AgentPolicy policy);
AgentPolicy agent_policy_from_string(const std::string& s);

struct PlanDiagnostics {
  int flat_index = -1;
  bool emergency_stop = false;
  int num_candidates = 0;
  int num_excluded = 0;
  double combined_score = 0.0;
};

struct SimTick {
  BicycleState av;
  ControlInput control;
  std::vector<AgentSnapshot> agents;
  PlanDiagnostics plan;
};

struct SimEvent {
  std::size_t tick = 0;
  std::string type;  // collision | off_road | emergency_stop | planner_failure
  std::string detail;
};

struct SimLog {
  BicycleState initial_av;
  std::vector<AgentSnapshot> initial_agents;
  BoxDims av_box;
  double dt = 0.1;
  std::vector<SimTick> ticks;
  std::vector<SimEvent> events;
  bool failed = false;
  std::string failure_reason;

  EpisodeTrace to_trace() const;
};

std::string simlog_to_json(const SimLog& log);
SimLog simlog_from_json(const std::string& bytes);

using PlanFn = std::function<PlanResult(const Scenario& observation)>;

PlanFn make_pipeline_planner(const PlannerConfig& config);
// Replays the scenario's AV ground truth (the log-replay expert).
PlanFn make_expert_planner(const Scenario& scenario);

inline constexpr int kEpisodeTicks = 150;  // 15 s at 10 Hz

// Closed-loop episode: agents advance (replay or IDM), the planner runs on
// the current observation window, the tracker executes the newest plan.
SimLog run_episode(const Scenario& scenario, const PlanFn& planner, AgentPolicy policy,
                   std::uint64_t seed, int n_ticks = kEpisodeTicks,
                   const PlannerConfig& tracker_config = {});

struct BenchmarkRow {
  std::string scenario_id;
  std::string kind;
  std::uint64_t seed = 0;
  bool failed = false;
  MetricReport report;
};

struct BenchmarkResult {
  std::vector<BenchmarkRow> rows;
  double mean_score = 0.0;  // over non-failed scenarios
  int failures = 0;
  double runtime_seconds = 0.0;
};

BenchmarkResult run_benchmark(const std::vector<Scenario>& scenarios,
                              const PlannerConfig& config, AgentPolicy policy,
                              int workers = 1, int n_ticks = kEpisodeTicks);

// One row per scenario: id, kind, seed, score, then the seven components.
std::string benchmark_csv(const BenchmarkResult& result);
std::string benchmark_json(const BenchmarkResult& result);

// The fixed acceptance suite: `per_kind` scenarios of every kind.
std::vector<Scenario> generate_suite(int per_kind, const GeneratorParams& params = {},
                                     std::uint64_t base_seed = 1);

}  // namespace plankit
