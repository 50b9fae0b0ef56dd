#pragma once

#include <vector>

#include "mcg/geometry.hpp"

namespace mcg {

/// Flat-yaw robot state with derivative bookkeeping (higher derivatives stay
/// zero under constant-twist commands).
struct RobotState {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
  Vec3 velocity = Vec3::Zero();  // world frame
  double yaw_rate = 0.0;
  Vec3 acceleration = Vec3::Zero();
  Vec3 jerk = Vec3::Zero();
  Vec3 snap = Vec3::Zero();
};

/// Body-frame twist held constant over a primitive.
struct TwistCommand {
  double vx = 0.0, vy = 0.0, vz = 0.0, omega = 0.0;
};

/// Below this yaw rate the arc degenerates to its straight-line limit.
constexpr double kOmegaEps = 1e-9;

/// Closed-form constant-twist state: heading advances linearly, position
/// follows the circular arc (or the straight-line limit as omega -> 0).
RobotState forward_arc_state(const RobotState& start, const TwistCommand& cmd,
                             double t);

struct MotionPrimitive {
  RobotState start;
  TwistCommand cmd;
  double duration = 0.0;
  double dt = 0.1;
  bool stopping = false;
  std::vector<RobotState> states;  // samples at 0, dt, ..., duration

  /// Exact state for constant-twist primitives; interpolation-free sampled
  /// lookup (nearest grid sample) for stopping primitives.
  RobotState state_at(double t) const;
};

/// Constant-twist primitive sampled every dt (final sample exactly at
/// `duration`).  Throws std::invalid_argument for non-positive duration/dt.
MotionPrimitive forward_arc_primitive(const RobotState& start,
                                      const TwistCommand& cmd, double duration,
                                      double dt);

/// Smooth ramp-down of the start state's twist to zero over `duration` using
/// a quintic speed profile: end velocity is exactly zero and displacement is
/// bounded by half the constant-twist displacement.  From rest this is a
/// hover in place.
MotionPrimitive stopping_primitive(const RobotState& start, double duration,
                                   double dt);

}  // namespace mcg
