#include "plankit/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace plankit {

BicycleState bicycle_step(const BicycleState& state, const ControlInput& u, double dt,
                          double wheelbase) {
  if (dt <= 0.0) throw std::invalid_argument("bicycle_step: dt must be > 0");
  BicycleState next;
  next.x = state.x + state.speed * std::cos(state.heading) * dt;
  next.y = state.y + state.speed * std::sin(state.heading) * dt;
  next.heading = normalize_angle(state.heading +
                                 state.speed / wheelbase * std::tan(u.steering) * dt);
  next.speed = std::max(0.0, state.speed + u.accel * dt);
  return next;
}

Eigen::MatrixXd riccati_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                             const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                             int horizon) {
  Eigen::MatrixXd P = Q;
  Eigen::MatrixXd K;
  for (int i = 0; i < horizon; ++i) {
    const Eigen::MatrixXd BtP = B.transpose() * P;
    K = (R + BtP * B).ldlt().solve(BtP * A);
    P = Q + A.transpose() * P * (A - B * K);
  }
  return K;
}

Eigen::RowVector2d LqrTracker::lateral_gain(double speed) const {
  // Gains depend on speed only through the linearization; quantize to 0.1 m/s
  // so repeated tracking calls share the recursion.
  const int bucket = static_cast<int>(std::lround(speed * 10.0));
  auto it = gain_cache_.find(bucket);
  if (it != gain_cache_.end()) return it->second;

  const double v = std::max(0.1, bucket / 10.0);
  const double dt = 0.1;
  Eigen::Matrix2d A;
  A << 1.0, v * dt, 0.0, 1.0;
  Eigen::Vector2d B(0.0, v / vehicle_.wheelbase * dt);
  Eigen::Matrix2d Q = Eigen::Matrix2d::Zero();
  Q(0, 0) = params_.q_lateral;
  Q(1, 1) = params_.q_heading;
  Eigen::MatrixXd R(1, 1);
  R << params_.r_steering;

  const Eigen::MatrixXd K = riccati_gain(A, B, Q, R, params_.horizon);
  Eigen::RowVector2d gain = K.row(0);
  gain_cache_.emplace(bucket, gain);
  return gain;
}

ControlInput LqrTracker::track(const BicycleState& state, const Trajectory& target,
                               int t_index) const {
  if (target.empty()) throw std::invalid_argument("lqr_track: empty target");

  std::vector<Vec2> path(target.size());
  double max_speed = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    path[i] = target.points[i].position();
    max_speed = std::max(max_speed, target.points[i].speed());
  }

  const std::size_t ref_idx = static_cast<std::size_t>(
      std::clamp<int>(t_index - 1, 0, static_cast<int>(target.size()) - 1));
  const TrajectoryPoint& ref = target.points[ref_idx];

  ControlInput u;

  // Degenerate / stop target: pure longitudinal control.
  const std::vector<double> s = cumulative_arclength(path);
  if (max_speed < 0.01 || s.back() < 0.1) {
    const Vec2 to_ref = ref.position() - state.position();
    const double along = to_ref.dot({std::cos(state.heading), std::sin(state.heading)});
    u.accel = std::clamp(params_.k_speed * (ref.speed() - state.speed) +
                             params_.k_station * along,
                         -vehicle_.max_decel, vehicle_.max_accel);
    u.steering = 0.0;
    return u;
  }

  const PolylineProjection proj = project_to_polyline(path, s, state.position());

  // Unclamp the station beyond the path ends so early/late vehicles see a
  // signed error instead of a saturated one.
  double s_cur = proj.arclength;
  if (proj.segment == 0 && proj.fraction <= 0.0) {
    const Vec2 dir = (path[1] - path[0]).normalized();
    s_cur = (state.position() - path[0]).dot(dir);
  } else if (proj.segment == path.size() - 2 && proj.fraction >= 1.0) {
    const Vec2 dir = (path[path.size() - 1] - path[path.size() - 2]).normalized();
    s_cur = s.back() + (state.position() - path.back()).dot(dir);
  }

  // Longitudinal: the t_index point is the state one tick from now, so the
  // station the vehicle should currently occupy is one step behind it.
  const double dt = 0.1;
  const double s_now = s[ref_idx] - ref.speed() * dt;
  u.accel = std::clamp(params_.k_speed * (ref.speed() - state.speed) +
                           params_.k_station * (s_now - s_cur),
                       -vehicle_.max_decel, vehicle_.max_accel);

  // Lateral: LQR about the nearest path point.
  const std::size_t seg = proj.segment;
  const TrajectoryPoint& a = target.points[seg];
  const TrajectoryPoint& b = target.points[seg + 1];
  const double path_heading =
      std::atan2(a.sin_h + proj.fraction * (b.sin_h - a.sin_h),
                 a.cos_h + proj.fraction * (b.cos_h - a.cos_h));
  const double e_y = proj.lateral;
  const double e_heading = normalize_angle(state.heading - path_heading);

  // Curvature feedforward from heading change along the path.
  const double ds = s[seg + 1] - s[seg];
  const double curvature =
      ds > 1e-6 ? normalize_angle(b.heading() - a.heading()) / ds : 0.0;
  const double ff = std::atan(vehicle_.wheelbase * curvature);

  const Eigen::RowVector2d K = lateral_gain(state.speed);
  const double fb = -(K(0) * e_y + K(1) * e_heading);
  u.steering =
      std::clamp(ff + fb, -vehicle_.max_steering, vehicle_.max_steering);
  return u;
}

ControlInput lqr_track(const BicycleState& state, const Trajectory& target,
                       int t_index) {
  static const LqrTracker tracker{LqrParams{}, VehicleParams{}};
  return tracker.track(state, target, t_index);
}

}  // namespace plankit
