#include "plankit/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "plankit/errors.hpp"

namespace plankit {

namespace {

using nlohmann::json;

AgentSnapshot snapshot_from_state(const AgentState& s) {
  return {s.pose, s.velocity, s.box, s.valid};
}

// Per-agent motion under the two benchmark policies.
class AgentSim {
 public:
  AgentSim(const Scenario& scenario, AgentPolicy policy) : policy_(policy) {
    const std::size_t n = scenario.agents.size();
    states_.reserve(n);
    for (const AgentTrack& agent : scenario.agents)
      states_.push_back(snapshot_from_state(agent.current()));

    if (policy_ == AgentPolicy::kReactive) {
      paths_.resize(n);
      for (std::size_t i = 0; i < n; ++i) init_reactive_path(scenario, i);
    }
  }

  const std::vector<AgentSnapshot>& states() const { return states_; }

  void advance(const Scenario& scenario, const BicycleState& av, int tick) {
    if (policy_ == AgentPolicy::kNonReactive) {
      advance_replay(scenario, tick);
    } else {
      advance_reactive(scenario, av);
    }
  }

 private:
  struct ReactivePath {
    std::vector<Vec2> points;
    std::vector<double> arclength;
    double lateral = 0.0;
    double station = 0.0;
    double speed = 0.0;
    double desired_speed = 10.0;
    bool valid = false;
  };

  void init_reactive_path(const Scenario& scenario, std::size_t i) {
    const AgentTrack& agent = scenario.agents[i];
    const Vec2 pos = agent.current().pose.position();

    const Lane* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const Lane& lane : scenario.lanes) {
      const auto s = cumulative_arclength(lane.centerline);
      const double d = project_to_polyline(lane.centerline, s, pos).distance;
      if (d < best_d) {
        best_d = d;
        best = &lane;
      }
    }
    if (!best) return;

    ReactivePath& path = paths_[i];
    std::vector<std::string> visited;
    const Lane* cur = best;
    path.desired_speed = cur->speed_limit;
    while (cur) {
      visited.push_back(cur->id);
      for (const Vec2& p : cur->centerline) {
        if (!path.points.empty() && (path.points.back() - p).norm() < 1e-9) continue;
        path.points.push_back(p);
      }
      path.desired_speed = std::min(path.desired_speed, cur->speed_limit);
      const Lane* next = nullptr;
      for (const std::string& succ : cur->successors) {
        if (std::find(visited.begin(), visited.end(), succ) != visited.end()) continue;
        next = scenario.find_lane(succ);
        break;
      }
      cur = next;
    }
    if (path.points.size() < 2) return;
    path.arclength = cumulative_arclength(path.points);
    const PolylineProjection proj =
        project_to_polyline(path.points, path.arclength, pos);
    path.station = proj.arclength;
    path.lateral = proj.lateral;
    path.speed = agent.current().velocity.norm();
    path.valid = true;
  }

  void advance_replay(const Scenario& scenario, int tick) {
    for (std::size_t i = 0; i < states_.size(); ++i) {
      const AgentTrack& agent = scenario.agents[i];
      if (agent.future_gt.empty()) {
        states_[i].velocity = {0.0, 0.0};
        continue;  // stays at the current pose
      }
      const int idx = std::min<int>(tick - 1,
                                    static_cast<int>(agent.future_gt.size()) - 1);
      const Vec2 pos = agent.future_gt[static_cast<std::size_t>(idx)];
      const Vec2 prev = idx > 0 ? agent.future_gt[static_cast<std::size_t>(idx - 1)]
                                : agent.current().pose.position();
      const Vec2 delta = pos - prev;
      const bool past_end = tick - 1 >= static_cast<int>(agent.future_gt.size());
      const double heading = delta.norm() > 1e-6 ? std::atan2(delta.y, delta.x)
                                                 : states_[i].pose.heading;
      states_[i].pose = {pos.x, pos.y, heading};
      states_[i].velocity = past_end ? Vec2{0.0, 0.0} : delta * (1.0 / scenario.dt);
    }
  }

  void advance_reactive(const Scenario& scenario, const BicycleState& av) {
    const double dt = scenario.dt;
    for (std::size_t i = 0; i < states_.size(); ++i) {
      ReactivePath& path = paths_[i];
      if (!path.valid) continue;

      // Nearest leader on this path: the AV or any other agent ahead within
      // a lateral corridor.
      double lead_gap = std::numeric_limits<double>::infinity();
      double lead_speed = 0.0;
      auto consider = [&](const Vec2& pos, const Vec2& vel, double half_len) {
        const PolylineProjection proj =
            project_to_polyline(path.points, path.arclength, pos);
        if (std::abs(proj.lateral - path.lateral) > 2.0) return;
        const double ahead = proj.arclength - path.station;
        if (ahead <= 0.0 || ahead > 80.0) return;
        const Vec2 a = path.points[proj.segment];
        const Vec2 b = path.points[proj.segment + 1];
        const Vec2 tangent = (b - a).normalized();
        const double gap =
            ahead - half_len - 0.5 * scenario.agents[i].current().box.length;
        if (gap < lead_gap) {
          lead_gap = gap;
          lead_speed = vel.dot(tangent);
        }
      };
      consider(av.position(), av.velocity(), 0.5 * scenario.av.current().box.length);
      for (std::size_t j = 0; j < states_.size(); ++j)
        if (j != i)
          consider(states_[j].pose.position(), states_[j].velocity,
                   0.5 * states_[j].box.length);

      const double accel = idm_acceleration(path.speed, path.desired_speed, lead_gap,
                                            path.speed - lead_speed);
      path.station += path.speed * dt;
      path.speed = std::max(0.0, path.speed + accel * dt);

      const double s = std::min(path.station, path.arclength.back());
      const Vec2 base = polyline_interpolate(path.points, path.arclength, s);
      const PolylineProjection proj =
          project_to_polyline(path.points, path.arclength, base);
      const Vec2 a = path.points[proj.segment];
      const Vec2 b = path.points[proj.segment + 1];
      const double heading = std::atan2(b.y - a.y, b.x - a.x);
      const Vec2 normal{-std::sin(heading), std::cos(heading)};
      const Vec2 pos = base + normal * path.lateral;
      states_[i].pose = {pos.x, pos.y, heading};
      states_[i].velocity = Vec2{std::cos(heading), std::sin(heading)} * path.speed;
    }
  }

  AgentPolicy policy_;
  std::vector<AgentSnapshot> states_;
  std::vector<ReactivePath> paths_;
};

AgentState av_state_from_bicycle(const BicycleState& s, const BoxDims& box) {
  AgentState out;
  out.pose = {s.x, s.y, s.heading};
  out.velocity = s.velocity();
  out.box = box;
  out.valid = true;
  return out;
}

}  // namespace

std::string to_string(AgentPolicy policy) {
  return policy == AgentPolicy::kNonReactive ? "non_reactive" : "reactive";
}

AgentPolicy agent_policy_from_string(const std::string& s) {
  if (s == "non_reactive") return AgentPolicy::kNonReactive;
  if (s == "reactive") return AgentPolicy::kReactive;
  throw ParseError("unknown agent policy '" + s + "'");
}

EpisodeTrace SimLog::to_trace() const {
  EpisodeTrace trace;
  trace.dt = dt;
  trace.av_box = av_box;
  trace.av_states.reserve(ticks.size() + 1);
  trace.av_states.push_back(initial_av);
  for (const SimTick& tick : ticks) trace.av_states.push_back(tick.av);

  trace.agents.resize(initial_agents.size());
  for (std::size_t a = 0; a < initial_agents.size(); ++a) {
    trace.agents[a].reserve(ticks.size() + 1);
    trace.agents[a].push_back(initial_agents[a]);
    for (const SimTick& tick : ticks) trace.agents[a].push_back(tick.agents[a]);
  }
  return trace;
}

PlanFn make_pipeline_planner(const PlannerConfig& config) {
  auto planner = std::make_shared<Planner>(config);
  return [planner](const Scenario& observation) { return planner->plan(observation); };
}

PlanFn make_expert_planner(const Scenario& scenario) {
  auto tick = std::make_shared<int>(0);
  const std::vector<Vec2> gt = scenario.av.future_gt;
  const double dt = scenario.dt;
  return [tick, gt, dt](const Scenario& observation) {
    PlanResult result;
    Trajectory traj;
    const int offset = (*tick)++;
    const int horizon = 80;
    traj.points.resize(static_cast<std::size_t>(horizon));
    const Vec2 cur = observation.av.current().pose.position();
    for (int k = 0; k < horizon; ++k) {
      const int idx = std::min<int>(offset + k, static_cast<int>(gt.size()) - 1);
      const Vec2 pos = idx >= 0 && !gt.empty() ? gt[static_cast<std::size_t>(idx)] : cur;
      const int prev_idx = offset + k - 1;
      const Vec2 prev = prev_idx >= 0 && prev_idx < static_cast<int>(gt.size())
                            ? gt[static_cast<std::size_t>(prev_idx)]
                            : cur;
      const Vec2 delta = pos - prev;
      const double heading = delta.norm() > 1e-6
                                 ? std::atan2(delta.y, delta.x)
                                 : observation.av.current().pose.heading;
      TrajectoryPoint& pt = traj.points[static_cast<std::size_t>(k)];
      pt.x = pos.x;
      pt.y = pos.y;
      pt.cos_h = std::cos(heading);
      pt.sin_h = std::sin(heading);
      pt.vx = delta.x / dt;
      pt.vy = delta.y / dt;
    }
    result.trajectory = traj;
    result.selection.trajectory = std::move(traj);
    return result;
  };
}

SimLog run_episode(const Scenario& scenario, const PlanFn& planner, AgentPolicy policy,
                   std::uint64_t seed, int n_ticks, const PlannerConfig& tracker_config) {
  (void)seed;  // episodes are deterministic; the seed names the run
  SimLog log;
  log.dt = scenario.dt;
  log.av_box = scenario.av.current().box;

  const AgentState& av0 = scenario.av.current();
  BicycleState av{av0.pose.x, av0.pose.y, av0.pose.heading, av0.velocity.norm()};
  log.initial_av = av;

  AgentSim agents(scenario, policy);
  log.initial_agents = agents.states();

  const LqrTracker tracker(tracker_config.lqr, tracker_config.vehicle);

  // Rolling observation histories.
  std::vector<AgentState> av_history = scenario.av.history;
  std::vector<std::vector<AgentState>> agent_histories;
  agent_histories.reserve(scenario.agents.size());
  for (const AgentTrack& agent : scenario.agents)
    agent_histories.push_back(agent.history);

  ControlInput last_control;
  const DrivableMap drivable(scenario);

  for (int tick = 1; tick <= n_ticks; ++tick) {
    agents.advance(scenario, av, tick);

    // Observation: current world state, no ground-truth futures.
    Scenario obs;
    obs.lanes = scenario.lanes;
    obs.obstacles = scenario.obstacles;
    obs.route_lane_ids = scenario.route_lane_ids;
    obs.dt = scenario.dt;
    obs.av = scenario.av;
    obs.av.history = av_history;
    obs.av.future_gt.clear();
    obs.av_acceleration = last_control.accel;
    obs.av_steering = last_control.steering;
    obs.agents.resize(scenario.agents.size());
    for (std::size_t a = 0; a < scenario.agents.size(); ++a) {
      obs.agents[a].id = scenario.agents[a].id;
      obs.agents[a].kind = scenario.agents[a].kind;
      obs.agents[a].history = agent_histories[a];
    }

    SimTick record;
    PlanResult plan;
    try {
      plan = planner(obs);
    } catch (const std::exception& e) {
      log.failed = true;
      log.failure_reason = e.what();
      log.events.push_back({static_cast<std::size_t>(tick), "planner_failure", e.what()});
      break;
    }

    const ControlInput u = tracker.track(av, plan.trajectory, 1);
    av = bicycle_step(av, u, scenario.dt, tracker_config.vehicle.wheelbase);
    last_control = u;

    record.av = av;
    record.control = u;
    record.agents = agents.states();
    record.plan.flat_index = plan.selection.flat_index;
    record.plan.emergency_stop = plan.selection.emergency_stop;
    record.plan.num_candidates = static_cast<int>(plan.num_candidates);
    record.plan.num_excluded = static_cast<int>(plan.num_excluded);
    record.plan.combined_score = plan.selection.combined_score;
    log.ticks.push_back(std::move(record));

    if (plan.selection.emergency_stop)
      log.events.push_back({static_cast<std::size_t>(tick), "emergency_stop", ""});

    // Online events (metrics recompute these offline in full).
    const Obb av_box{{av.x, av.y, av.heading}, log.av_box.length, log.av_box.width};
    for (std::size_t a = 0; a < agents.states().size(); ++a) {
      const AgentSnapshot& snap = agents.states()[a];
      if (!snap.valid) continue;
      if (obb_overlap(av_box, {snap.pose, snap.box.length, snap.box.width})) {
        log.events.push_back({static_cast<std::size_t>(tick), "collision",
                              scenario.agents[a].id});
        break;
      }
    }
    if (!drivable.empty() && !drivable.contains(av.position()))
      log.events.push_back({static_cast<std::size_t>(tick), "off_road", ""});

    // Roll histories forward.
    av_history.erase(av_history.begin());
    av_history.push_back(av_state_from_bicycle(av, log.av_box));
    for (std::size_t a = 0; a < agent_histories.size(); ++a) {
      const AgentSnapshot& snap = agents.states()[a];
      AgentState next;
      next.pose = snap.pose;
      next.velocity = snap.velocity;
      next.box = snap.box;
      next.valid = snap.valid;
      agent_histories[a].erase(agent_histories[a].begin());
      agent_histories[a].push_back(next);
    }
  }
  return log;
}

BenchmarkResult run_benchmark(const std::vector<Scenario>& scenarios,
                              const PlannerConfig& config, AgentPolicy policy,
                              int workers, int n_ticks) {
  const auto start = std::chrono::steady_clock::now();
  BenchmarkResult result;
  result.rows.resize(scenarios.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    const PlanFn planner = make_pipeline_planner(config);
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= scenarios.size()) break;
      const Scenario& scenario = scenarios[i];
      BenchmarkRow& row = result.rows[i];
      row.scenario_id = scenario.id.empty() ? "scenario_" + std::to_string(i)
                                            : scenario.id;
      row.kind = scenario.kind;
      row.seed = scenario.seed;
      try {
        const SimLog log = run_episode(scenario, planner, policy, scenario.seed,
                                       n_ticks, config);
        if (log.failed) {
          row.failed = true;
          continue;
        }
        row.report = evaluate_episode(log.to_trace(), scenario, config.thresholds);
      } catch (const std::exception&) {
        row.failed = true;
      }
    }
  };

  workers = std::max(1, workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  double sum = 0.0;
  int counted = 0;
  for (const BenchmarkRow& row : result.rows) {
    if (row.failed) {
      ++result.failures;
      continue;
    }
    sum += row.report.aggregate;
    ++counted;
  }
  result.mean_score = counted > 0 ? sum / counted : 0.0;
  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string benchmark_csv(const BenchmarkResult& result) {
  std::ostringstream out;
  out << "scenario_id,kind,seed,score,no_at_fault_collision,ttc_within_bound,"
         "drivable_compliance,driving_direction,comfort,progress,speed_compliance\n";
  char buf[256];
  for (const BenchmarkRow& row : result.rows) {
    if (row.failed) {
      out << row.scenario_id << "," << row.kind << "," << row.seed
          << ",failed,,,,,,,\n";
      continue;
    }
    const MetricReport& r = row.report;
    std::snprintf(buf, sizeof(buf),
                  "%.4f,%.0f,%.0f,%.0f,%.1f,%.0f,%.4f,%.4f", r.aggregate,
                  r.no_at_fault_collision, r.ttc_within_bound, r.drivable_compliance,
                  r.driving_direction, r.comfort, r.progress, r.speed_compliance);
    out << row.scenario_id << "," << row.kind << "," << row.seed << "," << buf << "\n";
  }
  return out.str();
}

std::string benchmark_json(const BenchmarkResult& result) {
  json doc;
  doc["mean_score"] = result.mean_score;
  doc["failures"] = result.failures;
  doc["runtime_seconds"] = result.runtime_seconds;
  json rows = json::array();
  for (const BenchmarkRow& row : result.rows) {
    json r;
    r["scenario_id"] = row.scenario_id;
    r["kind"] = row.kind;
    r["seed"] = row.seed;
    r["failed"] = row.failed;
    if (!row.failed) {
      r["score"] = row.report.aggregate;
      r["no_at_fault_collision"] = row.report.no_at_fault_collision;
      r["ttc_within_bound"] = row.report.ttc_within_bound;
      r["drivable_compliance"] = row.report.drivable_compliance;
      r["driving_direction"] = row.report.driving_direction;
      r["comfort"] = row.report.comfort;
      r["progress"] = row.report.progress;
      r["speed_compliance"] = row.report.speed_compliance;
    }
    rows.push_back(std::move(r));
  }
  doc["scenarios"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::vector<Scenario> generate_suite(int per_kind, const GeneratorParams& params,
                                     std::uint64_t base_seed) {
  std::vector<Scenario> out;
  out.reserve(static_cast<std::size_t>(per_kind) * 6);
  for (ScenarioKind kind : all_scenario_kinds())
    for (int i = 0; i < per_kind; ++i)
      out.push_back(generate_scenario(kind, params, base_seed + static_cast<std::uint64_t>(i)));
  return out;
}

namespace {

json bicycle_to_json(const BicycleState& s) {
  return json::array({s.x, s.y, s.heading, s.speed});
}
BicycleState bicycle_from_json(const json& j) {
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
          j[3].get<double>()};
}
json snapshot_to_json(const AgentSnapshot& s) {
  return json::array({s.pose.x, s.pose.y, s.pose.heading, s.velocity.x, s.velocity.y,
                      s.box.length, s.box.width, s.valid ? 1 : 0});
}
AgentSnapshot snapshot_from_json(const json& j) {
  AgentSnapshot s;
  s.pose = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  s.velocity = {j[3].get<double>(), j[4].get<double>()};
  s.box = {j[5].get<double>(), j[6].get<double>()};
  s.valid = j[7].get<int>() != 0;
  return s;
}

}  // namespace

std::string simlog_to_json(const SimLog& log) {
  json doc;
  doc["dt"] = log.dt;
  doc["av_box"] = json::array({log.av_box.length, log.av_box.width});
  doc["initial_av"] = bicycle_to_json(log.initial_av);
  json init_agents = json::array();
  for (const AgentSnapshot& s : log.initial_agents) init_agents.push_back(snapshot_to_json(s));
  doc["initial_agents"] = std::move(init_agents);

  json ticks = json::array();
  for (const SimTick& t : log.ticks) {
    json jt;
    jt["av"] = bicycle_to_json(t.av);
    jt["control"] = json::array({t.control.accel, t.control.steering});
    json ja = json::array();
    for (const AgentSnapshot& s : t.agents) ja.push_back(snapshot_to_json(s));
    jt["agents"] = std::move(ja);
    jt["plan"] = json{{"flat_index", t.plan.flat_index},
                      {"emergency_stop", t.plan.emergency_stop},
                      {"num_candidates", t.plan.num_candidates},
                      {"num_excluded", t.plan.num_excluded},
                      {"combined_score", t.plan.combined_score}};
    ticks.push_back(std::move(jt));
  }
  doc["ticks"] = std::move(ticks);

  json events = json::array();
  for (const SimEvent& e : log.events)
    events.push_back(json{{"tick", e.tick}, {"type", e.type}, {"detail", e.detail}});
  doc["events"] = std::move(events);
  doc["failed"] = log.failed;
  doc["failure_reason"] = log.failure_reason;
  return doc.dump(2) + "\n";
}

SimLog simlog_from_json(const std::string& bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid simlog JSON: ") + e.what());
  }
  SimLog log;
  log.dt = doc.at("dt").get<double>();
  log.av_box = {doc.at("av_box")[0].get<double>(), doc.at("av_box")[1].get<double>()};
  log.initial_av = bicycle_from_json(doc.at("initial_av"));
  for (const json& s : doc.at("initial_agents"))
    log.initial_agents.push_back(snapshot_from_json(s));
  for (const json& jt : doc.at("ticks")) {
    SimTick t;
    t.av = bicycle_from_json(jt.at("av"));
    t.control = {jt.at("control")[0].get<double>(), jt.at("control")[1].get<double>()};
    for (const json& s : jt.at("agents")) t.agents.push_back(snapshot_from_json(s));
    const json& plan = jt.at("plan");
    t.plan.flat_index = plan.at("flat_index").get<int>();
    t.plan.emergency_stop = plan.at("emergency_stop").get<bool>();
    t.plan.num_candidates = plan.at("num_candidates").get<int>();
    t.plan.num_excluded = plan.at("num_excluded").get<int>();
    t.plan.combined_score = plan.at("combined_score").get<double>();
    log.ticks.push_back(std::move(t));
  }
  for (const json& e : doc.at("events"))
    log.events.push_back({e.at("tick").get<std::size_t>(), e.at("type").get<std::string>(),
                          e.at("detail").get<std::string>()});
  log.failed = doc.at("failed").get<bool>();
  log.failure_reason = doc.at("failure_reason").get<std::string>();
  return log;
}

}  // namespace plankit
