#include "mcg/action_space.hpp"

namespace mcg {

namespace {

std::vector<double> linspace_sym(double hi, int n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = 0.0;
    return v;
  }
  for (int i = 0; i < n; ++i) {
    v[i] = -hi + 2.0 * hi * i / (n - 1);
  }
  return v;
}

Mpl expand(const std::string& name, const RobotState& start, double vx,
           double vy, double duration, const PlannerConfig& cfg) {
  Mpl mpl;
  mpl.name = name;
  for (double omega : linspace_sym(cfg.omega_max, cfg.n_omega)) {
    for (double vz : linspace_sym(cfg.v_max_z, cfg.n_vz)) {
      mpl.primitives.push_back(
          forward_arc_primitive(start, {vx, vy, vz, omega}, duration, cfg.dt));
    }
  }
  return mpl;
}

Mpl yaw_in_place(const RobotState& start, const PlannerConfig& cfg) {
  Mpl mpl;
  mpl.name = "yaw";
  for (double vz : linspace_sym(cfg.v_max_z, cfg.n_vz)) {
    mpl.primitives.push_back(
        forward_arc_primitive(start, {0.0, 0.0, vz, cfg.omega_max}, cfg.tau, cfg.dt));
  }
  return mpl;
}

}  // namespace

std::vector<Mpl> build_action_space(const RobotState& start, SensorKind kind,
                                    const PlannerConfig& cfg) {
  const double v = cfg.v_max_xy;
  const double t1 = cfg.tau, t2 = 2.0 * cfg.tau;
  std::vector<Mpl> out;
  if (kind == SensorKind::lidar) {
    out.push_back(expand("fwd_1", start, v, 0.0, t1, cfg));
    out.push_back(expand("fwd_2", start, v, 0.0, t2, cfg));
    out.push_back(expand("back_1", start, -v, 0.0, t1, cfg));
    out.push_back(expand("back_2", start, -v, 0.0, t2, cfg));
  } else {
    out.push_back(expand("fwd_1", start, v, 0.0, t1, cfg));
    out.push_back(expand("fwd_2", start, v, 0.0, t2, cfg));
    out.push_back(expand("left_1", start, 0.0, v, t1, cfg));
    out.push_back(expand("left_2", start, 0.0, v, t2, cfg));
    out.push_back(expand("right_1", start, 0.0, -v, t1, cfg));
    out.push_back(expand("right_2", start, 0.0, -v, t2, cfg));
    out.push_back(yaw_in_place(start, cfg));
  }
  return out;
}

}  // namespace mcg
