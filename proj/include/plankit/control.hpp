#pragma once

#include <unordered_map>

#include <Eigen/Dense>

#include "plankit/trajectory.hpp"

namespace plankit {

struct BicycleState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;  // >= 0, reverse out of scope

  Vec2 position() const { return {x, y}; }
  Vec2 velocity() const { return {speed * std::cos(heading), speed * std::sin(heading)}; }
};

struct ControlInput {
  double accel = 0.0;     // m/s^2
  double steering = 0.0;  // rad
};

struct VehicleParams {
  double wheelbase = 3.089;
  double max_accel = 1.5;
  double max_decel = 4.0;      // b_max
  double max_steering = 0.55;  // rad
};

// Forward-Euler kinematic bicycle step; speed clamps at zero.
BicycleState bicycle_step(const BicycleState& state, const ControlInput& u, double dt,
                          double wheelbase);

struct LqrParams {
  int horizon = 40;
  double q_lateral = 1.0;
  double q_heading = 2.0;
  double r_steering = 8.0;
  double k_speed = 2.0;
  double k_station = 0.5;
};

// Finite-horizon discrete LQR gain by backward Riccati recursion.
Eigen::MatrixXd riccati_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                             const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                             int horizon);

// Decoupled tracker: lateral finite-horizon LQR on (e_y, e_heading) errors
// linearized at the current speed, longitudinal PD on (speed, station).
class LqrTracker {
 public:
  LqrTracker() = default;
  LqrTracker(const LqrParams& params, const VehicleParams& vehicle)
      : params_(params), vehicle_(vehicle) {}

  // `t_index` is the 1-based tick the plan point targets.
  ControlInput track(const BicycleState& state, const Trajectory& target,
                     int t_index) const;

 private:
  Eigen::RowVector2d lateral_gain(double speed) const;

  LqrParams params_;
  VehicleParams vehicle_;
  mutable std::unordered_map<int, Eigen::RowVector2d> gain_cache_;
};

// Convenience wrapper with default parameters.
ControlInput lqr_track(const BicycleState& state, const Trajectory& target, int t_index);

}  // namespace plankit
