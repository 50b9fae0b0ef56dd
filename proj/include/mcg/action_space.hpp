#pragma once

#include <string>
#include <vector>

#include "mcg/primitives.hpp"

namespace mcg {

enum class SensorKind { lidar, depth };

struct PlannerConfig {
  double v_max_xy = 0.75;
  double v_max_z = 0.5;
  double omega_max = 0.25;
  double tau = 3.0;  // planning round length; primitives last tau or 2*tau
  double dt = 0.1;
  int n_omega = 3;
  int n_vz = 5;
  int csqmi_poses = 1;           // poses sampled along a candidate (1 = endpoint)
  double frontier_weight = 1.0;  // c in  I + c * V
  double r_coll = 0.3;
  double unknown_delta = 0.1;
  double watchdog_s = 30.0;
};

/// One motion-primitive library: a travel direction/duration template
/// expanded over the yaw-rate x vertical-speed grid.
struct Mpl {
  std::string name;
  std::vector<MotionPrimitive> primitives;
};

/// Omnidirectional-sensor spaces use +/-x templates at tau and 2*tau (4 MPLs,
/// 60 primitives with the default 3x5 grid); limited-FoV spaces never reverse
/// blind: +x and +/-y templates plus a yaw-in-place library (7 MPLs, 95
/// primitives).
std::vector<Mpl> build_action_space(const RobotState& start, SensorKind kind,
                                    const PlannerConfig& cfg);

}  // namespace mcg
