#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>
#include <numeric>

#include "plankit/proposer.hpp"
#include "test_util.hpp"

using namespace plankit;
using namespace plankit::testutil;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("idm: equilibrium on a free road is exactly zero") {
  CHECK(idm_acceleration(10.0, 10.0, kInf, 0.0) == 0.0);
}

TEST_CASE("idm: standstill on a free road accelerates at a_max") {
  const IdmParams p;
  CHECK(idm_acceleration(0.0, 10.0, kInf, 0.0, p) == doctest::Approx(p.max_accel));
}

TEST_CASE("idm: gap equal to s* at matched speed brakes at -a_max") {
  const IdmParams p;
  const double v = 10.0;
  const double s_star = p.min_gap + v * p.time_headway;  // dv = 0
  CHECK(idm_acceleration(v, v, s_star, 0.0, p) == doctest::Approx(-p.max_accel));
}

TEST_CASE("idm: nonpositive gap brakes at the emergency bound") {
  const IdmParams p;
  CHECK(idm_acceleration(5.0, 10.0, 0.0, 0.0, p) == -p.max_decel);
  CHECK(idm_acceleration(5.0, 10.0, -2.0, 0.0, p) == -p.max_decel);
}

TEST_CASE("predict_agents") {
  Scenario s = make_straight_scenario();

  SUBCASE("stationary agent keeps its position") {
    s.agents.push_back(make_track("a", 20.0, 0.0, 0.0, 0.0));
    const auto pred = predict_agents(s);
    for (const Vec2& p : pred[0]) {
      CHECK(p.x == doctest::Approx(20.0));
      CHECK(p.y == doctest::Approx(0.0));
    }
  }
  SUBCASE("5 m/s agent advances 0.5 m per step") {
    s.agents.push_back(make_track("a", 20.0, 0.0, 0.0, 5.0));
    const auto pred = predict_agents(s);
    for (std::size_t t = 0; t < pred[0].size(); ++t)
      CHECK(pred[0][t].x == doctest::Approx(20.0 + 0.5 * (t + 1)).epsilon(1e-12));
  }
  SUBCASE("invalid current frame holds the last valid one") {
    AgentTrack track = make_track("a", 20.0, 0.0, 0.0, 4.0);
    track.history.back().valid = false;
    track.history.back().velocity = {0.0, 0.0};
    s.agents.push_back(track);
    const auto pred = predict_agents(s);
    // Anchor is the last valid frame (one tick back at 4 m/s).
    CHECK(pred[0][0].x == doctest::Approx(20.0 - 0.4 + 0.4).epsilon(1e-9));
  }
}

TEST_CASE("free-flow proposal on the centerline is straight constant speed") {
  const Scenario s = make_straight_scenario(10.0, 3.5, 10.0);
  const auto refs = find_reference_lines(s);
  REQUIRE(refs.size() == 1);
  const ProposalSet proposals = generate_proposals(s, refs);
  REQUIRE(proposals.num_refs() == 1);
  REQUIRE(proposals.num_lon() == 12);

  const Trajectory& free_flow = proposals.trajectories[0][11];
  for (std::size_t k = 0; k < free_flow.size(); ++k) {
    CHECK(std::abs(free_flow.points[k].y) < 1e-6);
    CHECK(free_flow.points[k].speed() == doctest::Approx(10.0).epsilon(1e-6));
  }
}

TEST_CASE("stopping profile halts at its target arclength") {
  const Scenario s = make_straight_scenario(5.0, 3.5, 10.0);
  const auto refs = find_reference_lines(s);
  ProposerParams params;
  params.horizon_steps = 150;  // long enough for the roll-in to settle
  const ProposalSet proposals = generate_proposals(s, refs, params);

  // Find the proposal whose stop target is nearest 20 m ahead of the AV and
  // verify it is slow by the time it reaches the target.
  const FrenetCoord av_sd = project(refs[0], s.av.current().pose.position());
  const double remaining = refs[0].length() - av_sd.s;
  int best_j = -1;
  double best_gap = kInf;
  for (int j = 0; j < 11; ++j) {
    const double target = (j + 1) / 11.0 * remaining;
    if (std::abs(target - 20.0) < best_gap) {
      best_gap = std::abs(target - 20.0);
      best_j = j;
    }
  }
  const Trajectory& stopper = proposals.trajectories[0][best_j];
  const double stop_target = av_sd.s + (best_j + 1) / 11.0 * remaining;
  for (const TrajectoryPoint& p : stopper.points) {
    const double arc = project(refs[0], p.position()).s;
    if (arc >= stop_target - 0.2) CHECK(p.speed() < 0.35);
  }
  CHECK(stopper.points.back().speed() < 0.1);
}

TEST_CASE("stopping profiles are monotonically non-increasing after braking onset") {
  const Scenario s = make_straight_scenario(8.0, 3.5, 10.0);
  const auto refs = find_reference_lines(s);
  const ProposalSet proposals = generate_proposals(s, refs);
  for (int j = 0; j < 11; ++j) {
    const Trajectory& t = proposals.trajectories[0][j];
    bool braking = false;
    for (std::size_t k = 1; k < t.size(); ++k) {
      const double dv = t.points[k].speed() - t.points[k - 1].speed();
      if (dv < -1e-9) braking = true;
      if (braking) CHECK(dv <= 1e-9);
    }
  }
}

TEST_CASE("proposal grid invariants") {
  Scenario s = make_straight_scenario(8.0);
  s.agents.push_back(make_track("lead", 25.0, 0.0, 0.0, 0.0));
  const auto refs = find_reference_lines(s);
  const ProposalSet proposals = generate_proposals(s, refs);

  CHECK(proposals.trajectories.size() == refs.size());
  for (const auto& row : proposals.trajectories) CHECK(row.size() == 12);
  const double total = std::accumulate(proposals.confidences.begin(),
                                       proposals.confidences.end(), 0.0);
  CHECK(std::abs(total - 1.0) < 1e-9);
  for (const auto& row : proposals.trajectories)
    for (const Trajectory& t : row) CHECK(heading_normalization_error(t) < 1e-6);
}

TEST_CASE("leader-aware profiles never cross a stopped lead") {
  Scenario s = make_straight_scenario(8.0, 3.5, 10.0);
  s.agents.push_back(make_track("lead", 30.0, 0.0, 0.0, 0.0));
  const auto refs = find_reference_lines(s);
  const ProposalSet proposals = generate_proposals(s, refs);
  const double lead_rear = 30.0 - 0.5 * 4.6;
  for (const auto& row : proposals.trajectories)
    for (const Trajectory& t : row)
      for (const TrajectoryPoint& p : t.points)
        CHECK(p.x + 0.5 * 4.6 < lead_rear + 0.01);
}

TEST_CASE("red route lane imposes a stop line on every profile") {
  Scenario s = make_straight_scenario(8.0, 3.5, 10.0);
  // Split the lane: the downstream half is signalized red.
  Lane first = make_lane("main", {-60, 0}, 0.0, 100.0, 3.5);
  first.successors = {"signal"};
  Lane second = make_lane("signal", {40, 0}, 0.0, 260.0, 3.5);
  second.traffic_light = LightStatus::kRed;
  s.lanes = {first, second};
  s.route_lane_ids = {"main", "signal"};

  const auto refs = find_reference_lines(s);
  REQUIRE(refs.size() == 1);
  const ProposalSet proposals = generate_proposals(s, refs);
  for (const auto& row : proposals.trajectories)
    for (const Trajectory& t : row)
      for (const TrajectoryPoint& p : t.points)
        CHECK(p.x + 0.5 * 4.6 < 40.0 + 0.01);  // front bumper before the line
}

TEST_CASE("no reference lines falls back to the free head only") {
  Scenario s;
  s.av = make_track("av", 0.0, 0.0, 0.3, 6.0);
  const ProposalSet proposals = generate_proposals(s, {});
  CHECK(proposals.trajectories.empty());
  CHECK(proposals.confidences.empty());
  REQUIRE(proposals.free.size() == 80);
  const Vec2 v = s.av.current().velocity;
  for (std::size_t k = 0; k < proposals.free.size(); ++k) {
    CHECK(proposals.free.points[k].x ==
          doctest::Approx(v.x * 0.1 * (k + 1)).epsilon(1e-9));
    CHECK(proposals.free.points[k].y ==
          doctest::Approx(v.y * 0.1 * (k + 1)).epsilon(1e-9));
  }
}
