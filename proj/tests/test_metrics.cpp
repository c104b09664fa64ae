#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "plankit/metrics.hpp"
#include "test_util.hpp"

using namespace plankit;
using namespace plankit::testutil;

namespace {

EpisodeTrace straight_trace(double speed, int n_ticks = 50, double y = 0.0) {
  EpisodeTrace trace;
  trace.av_box = {4.6, 2.0};
  for (int t = 0; t <= n_ticks; ++t)
    trace.av_states.push_back({speed * 0.1 * t, y, 0.0, speed});
  return trace;
}

void add_stationary_agent(EpisodeTrace& trace, double x, double y, double heading = 0.0) {
  std::vector<AgentSnapshot> seq(trace.av_states.size());
  for (auto& s : seq) s = {{x, y, heading}, {0.0, 0.0}, {4.6, 2.0}, true};
  trace.agents.push_back(std::move(seq));
}

DrivableMap straight_drivable(Scenario& holder, double width = 3.5) {
  holder = make_straight_scenario(10.0, width);
  return DrivableMap(holder);
}

}  // namespace

TEST_CASE("at-fault: driving into a stopped box") {
  Scenario holder;
  const DrivableMap drivable = straight_drivable(holder);
  EpisodeTrace trace = straight_trace(10.0);
  add_stationary_agent(trace, 20.0, 0.0);
  const CollisionResult r = at_fault_collision(trace, {}, drivable);
  CHECK(r.at_fault);
  REQUIRE(r.first.has_value());
  CHECK(r.first->agent_index == 0);
  CHECK_FALSE(r.first->rear_contact);
}

TEST_CASE("at-fault: being rear-ended while stationary is exempt") {
  Scenario holder;
  const DrivableMap drivable = straight_drivable(holder);
  EpisodeTrace trace;
  trace.av_box = {4.6, 2.0};
  for (int t = 0; t <= 50; ++t) trace.av_states.push_back({0.0, 0.0, 0.0, 0.0});
  // Agent approaches from behind and hits the AV's rear.
  std::vector<AgentSnapshot> seq;
  for (int t = 0; t <= 50; ++t)
    seq.push_back({{-12.0 + 2.0 * 0.1 * t * 10.0, 0.0, 0.0}, {2.0, 0.0}, {4.6, 2.0}, true});
  trace.agents.push_back(std::move(seq));
  const CollisionResult r = at_fault_collision(trace, {}, drivable);
  CHECK_FALSE(r.at_fault);
  CHECK(r.first.has_value());  // the contact is recorded, just not at fault
}

TEST_CASE("at-fault: exactly tangent boxes do not collide") {
  Scenario holder;
  const DrivableMap drivable = straight_drivable(holder);
  EpisodeTrace trace;
  trace.av_box = {4.0, 2.0};
  trace.av_states.push_back({0.0, 0.0, 0.0, 1.0});
  add_stationary_agent(trace, 4.0, 0.0);  // touching front-to-rear
  const CollisionResult r = at_fault_collision(trace, {}, drivable);
  CHECK_FALSE(r.at_fault);
  CHECK_FALSE(r.first.has_value());
}

TEST_CASE("ttc metric") {
  SUBCASE("empty road passes") {
    const EpisodeTrace trace = straight_trace(12.0);
    CHECK(ttc_within_bound(trace));
  }
  SUBCASE("10 m/s toward a stopped agent 5 m ahead fails (TTC = 0.5 s)") {
    EpisodeTrace trace;
    trace.av_box = {4.6, 2.0};
    trace.av_states.push_back({0.0, 0.0, 0.0, 10.0});
    // Bumper-to-bumper gap of 5 m: centers 5 + 4.6 apart.
    add_stationary_agent(trace, 9.6, 0.0);
    CHECK_FALSE(ttc_within_bound(trace));
  }
  SUBCASE("an agent pulling away faster passes") {
    EpisodeTrace trace;
    trace.av_box = {4.6, 2.0};
    for (int t = 0; t <= 30; ++t) trace.av_states.push_back({t * 1.0, 0.0, 0.0, 10.0});
    std::vector<AgentSnapshot> seq;
    for (int t = 0; t <= 30; ++t)
      seq.push_back({{8.0 + t * 1.5, 0.0, 0.0}, {15.0, 0.0}, {4.6, 2.0}, true});
    trace.agents.push_back(std::move(seq));
    CHECK(ttc_within_bound(trace));
  }
}

TEST_CASE("ttc agrees with the dense projection oracle") {
  // Oracle: 0.01 s projection steps. Scenes in the coarse/dense disagreement
  // band (overlap shorter than 0.12 s or dense TTC within [0.85, 1.05]) are
  // regenerated; the discretizations legitimately differ there.
  Rng rng(2024);
  const MetricThresholds thresholds;
  int tested = 0;
  int failures_seen = 0;
  while (tested < 200) {
    EpisodeTrace trace;
    trace.av_box = {4.6, 2.0};
    const double v_av = rng.uniform(0.0, 13.0);
    trace.av_states.push_back({0.0, 0.0, rng.uniform(-0.3, 0.3), v_av});

    std::vector<AgentSnapshot> seq;
    const Vec2 pos{rng.uniform(-30.0, 30.0), rng.uniform(-12.0, 12.0)};
    const double heading = rng.uniform(-M_PI, M_PI);
    const double speed = rng.uniform(0.0, 12.0);
    seq.push_back({{pos.x, pos.y, heading},
                   Vec2{speed, 0.0}.rotated(heading),
                   {4.6, 2.0},
                   true});
    trace.agents.push_back(std::move(seq));

    // Dense oracle over the single tick.
    const BicycleState& av = trace.av_states[0];
    const AgentSnapshot& agent = trace.agents[0][0];
    double dense_ttc = -1.0;
    double overlap_duration = 0.0;
    for (int k = 1; k <= 300; ++k) {
      const double tau = 0.01 * k;
      Obb a{{av.x + av.velocity().x * tau, av.y + av.velocity().y * tau, av.heading},
            trace.av_box.length, trace.av_box.width};
      Obb b{{agent.pose.x + agent.velocity.x * tau, agent.pose.y + agent.velocity.y * tau,
             agent.pose.heading},
            agent.box.length, agent.box.width};
      if (oracle_obb_overlap(a, b)) {
        if (dense_ttc < 0.0) dense_ttc = tau;
        overlap_duration += 0.01;
      }
    }
    const bool initially_overlapping =
        oracle_obb_overlap({{av.x, av.y, av.heading}, 4.6, 2.0},
                           {agent.pose, 4.6, 2.0});
    if (initially_overlapping) continue;
    if (dense_ttc > 0.0 && (overlap_duration < 0.12 ||
                            (dense_ttc > 0.85 && dense_ttc < 1.05)))
      continue;

    const bool oracle_pass = dense_ttc < 0.0 || dense_ttc >= thresholds.ttc_bound;
    const bool got_pass = ttc_within_bound(trace, thresholds);
    CHECK(got_pass == oracle_pass);
    failures_seen += oracle_pass ? 0 : 1;
    ++tested;
  }
  CHECK(failures_seen > 10);  // the sample exercises both outcomes
}

TEST_CASE("drivable compliance") {
  Scenario holder;
  const DrivableMap drivable = straight_drivable(holder);
  SUBCASE("centered driving passes") {
    CHECK(drivable_compliance(straight_trace(10.0), drivable));
  }
  SUBCASE("driving 2 m off the lane fails") {
    CHECK_FALSE(drivable_compliance(straight_trace(10.0, 50, 3.0), drivable));
  }
  SUBCASE("slightly off is within the 0.3 m tolerance") {
    // Corners at |y| = 0.85 + 1.0; boundary at 1.75 -> overshoot 0.1 m.
    CHECK(drivable_compliance(straight_trace(10.0, 50, 0.85), drivable));
  }
}

TEST_CASE("driving direction compliance") {
  Scenario holder;
  const DrivableMap drivable = straight_drivable(holder);
  SUBCASE("forward driving scores 1") {
    CHECK(driving_direction(straight_trace(8.0), drivable) == 1.0);
  }
  SUBCASE("a short reverse excursion scores 0.5") {
    EpisodeTrace trace;
    trace.av_box = {4.6, 2.0};
    double x = 30.0;
    trace.av_states.push_back({x, 0.0, 0.0, 3.0});
    for (int t = 0; t < 10; ++t) {
      x -= 0.3;  // 3 m against the lane over 1 s
      trace.av_states.push_back({x, 0.0, M_PI, 3.0});
    }
    const double score = driving_direction(trace, drivable);
    CHECK(score == 0.5);
  }
  SUBCASE("a long reverse run scores 0") {
    EpisodeTrace trace;
    trace.av_box = {4.6, 2.0};
    double x = 60.0;
    trace.av_states.push_back({x, 0.0, 0.0, 7.0});
    for (int t = 0; t < 10; ++t) {
      x -= 0.7;
      trace.av_states.push_back({x, 0.0, M_PI, 7.0});
    }
    CHECK(driving_direction(trace, drivable) == 0.0);
  }
}

TEST_CASE("comfort bounds") {
  SUBCASE("steady cruise passes") { CHECK(comfort(straight_trace(10.0, 100))); }
  SUBCASE("emergency braking violates the longitudinal band") {
    EpisodeTrace trace;
    trace.av_box = {4.6, 2.0};
    double v = 12.0, x = 0.0;
    for (int t = 0; t <= 40; ++t) {
      trace.av_states.push_back({x, 0.0, 0.0, v});
      x += v * 0.1;
      v = std::max(0.0, v - 6.0 * 0.1);  // -6 m/s^2 < -4.05 bound
    }
    CHECK_FALSE(comfort(trace));
  }
  SUBCASE("violent yaw violates the yaw-rate bound") {
    EpisodeTrace trace;
    trace.av_box = {4.6, 2.0};
    for (int t = 0; t <= 40; ++t)
      trace.av_states.push_back(
          {t * 0.5, 0.0, (t % 2 ? 0.25 : -0.25), 5.0});
    CHECK_FALSE(comfort(trace));
  }
}

TEST_CASE("progress ratio") {
  Scenario holder;
  straight_drivable(holder);
  const auto route = route_reference_line(holder);
  REQUIRE(route.has_value());
  SUBCASE("half the expert distance scores 0.5") {
    const EpisodeTrace trace = straight_trace(5.0, 50);  // covers 25 m
    CHECK(progress_ratio(trace, *route, 50.0) == doctest::Approx(0.5).epsilon(1e-6));
  }
  SUBCASE("stationary expert scores 1") {
    const EpisodeTrace trace = straight_trace(0.0, 50);
    CHECK(progress_ratio(trace, *route, 0.05) == 1.0);
  }
  SUBCASE("overshooting clamps at 1") {
    const EpisodeTrace trace = straight_trace(10.0, 50);
    CHECK(progress_ratio(trace, *route, 20.0) == 1.0);
  }
}

TEST_CASE("speed compliance") {
  Scenario holder;
  const DrivableMap drivable = straight_drivable(holder);  // limit 10 m/s
  SUBCASE("at the limit scores 1") {
    CHECK(speed_compliance(straight_trace(10.0), drivable) == 1.0);
  }
  SUBCASE("uniform overspeed scales linearly") {
    const EpisodeTrace trace = straight_trace(11.115);  // +1.115 = norm/2
    CHECK(speed_compliance(trace, drivable) == doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("extreme overspeed clamps at 0") {
    CHECK(speed_compliance(straight_trace(20.0), drivable) == 0.0);
  }
}

TEST_CASE("aggregate score composition") {
  MetricReport r;
  CHECK(aggregate_score(r) == doctest::Approx(1.0));
  SUBCASE("an at-fault collision zeroes everything") {
    r.no_at_fault_collision = 0.0;
    CHECK(aggregate_score(r) == 0.0);
  }
  SUBCASE("ttc failure alone leaves 11/16") {
    r.ttc_within_bound = 0.0;
    CHECK(aggregate_score(r) == doctest::Approx(11.0 / 16.0));
  }
  SUBCASE("monotone non-decreasing in every component") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
      MetricReport a;
      a.no_at_fault_collision = rng.bernoulli(0.5) ? 1.0 : 0.0;
      a.ttc_within_bound = rng.bernoulli(0.5) ? 1.0 : 0.0;
      a.drivable_compliance = rng.bernoulli(0.5) ? 1.0 : 0.0;
      a.driving_direction = 0.5 * rng.uniform_index(3);
      a.comfort = rng.bernoulli(0.5) ? 1.0 : 0.0;
      a.progress = rng.uniform01();
      a.speed_compliance = rng.uniform01();
      MetricReport b = a;
      double* fields_a[7] = {&a.no_at_fault_collision, &a.ttc_within_bound,
                             &a.drivable_compliance,  &a.driving_direction,
                             &a.comfort,              &a.progress,
                             &a.speed_compliance};
      double* fields_b[7] = {&b.no_at_fault_collision, &b.ttc_within_bound,
                             &b.drivable_compliance,  &b.driving_direction,
                             &b.comfort,              &b.progress,
                             &b.speed_compliance};
      const std::size_t pick = rng.uniform_index(7);
      *fields_b[pick] = std::min(1.0, *fields_a[pick] + rng.uniform(0.0, 1.0));
      CHECK(aggregate_score(b) >= aggregate_score(a) - 1e-12);
    }
  }
}

TEST_CASE("boolean metrics are invariant under rigid scene transforms") {
  Scenario scenario = make_straight_scenario(10.0);
  scenario.agents.push_back(make_track("a", 60.0, 0.0, 0.0, 0.0));
  scenario.agents.back().future_gt = std::vector<Vec2>(kFutureSteps, {60.0, 0.0});

  EpisodeTrace trace = straight_trace(10.0, 80);
  add_stationary_agent(trace, 60.0, 0.0);

  const MetricReport base = evaluate_episode(trace, scenario);

  const double angle = 0.83;
  const Vec2 shift{112.0, -41.0};
  auto move_point = [&](Vec2 p) { return p.rotated(angle) + shift; };

  Scenario moved = scenario;
  for (Lane& lane : moved.lanes) {
    for (Vec2& p : lane.centerline) p = move_point(p);
    for (Vec2& p : lane.left_boundary) p = move_point(p);
    for (Vec2& p : lane.right_boundary) p = move_point(p);
  }
  auto move_track = [&](AgentTrack& t) {
    for (AgentState& s : t.history) {
      const Vec2 p = move_point(s.pose.position());
      s.pose = {p.x, p.y, normalize_angle(s.pose.heading + angle)};
      s.velocity = s.velocity.rotated(angle);
    }
    for (Vec2& p : t.future_gt) p = move_point(p);
  };
  move_track(moved.av);
  for (AgentTrack& t : moved.agents) move_track(t);

  EpisodeTrace moved_trace = trace;
  for (BicycleState& s : moved_trace.av_states) {
    const Vec2 p = move_point(s.position());
    s.x = p.x;
    s.y = p.y;
    s.heading = normalize_angle(s.heading + angle);
  }
  for (auto& seq : moved_trace.agents)
    for (AgentSnapshot& s : seq) {
      const Vec2 p = move_point(s.pose.position());
      s.pose = {p.x, p.y, normalize_angle(s.pose.heading + angle)};
      s.velocity = s.velocity.rotated(angle);
    }

  const MetricReport after = evaluate_episode(moved_trace, moved);
  CHECK(base.no_at_fault_collision == after.no_at_fault_collision);
  CHECK(base.ttc_within_bound == after.ttc_within_bound);
  CHECK(base.drivable_compliance == after.drivable_compliance);
  CHECK(base.comfort == after.comfort);
  CHECK(base.driving_direction == after.driving_direction);
}
