#include "mcg/primitives.hpp"

#include <cmath>
#include <stdexcept>

namespace mcg {

RobotState forward_arc_state(const RobotState& start, const TwistCommand& cmd,
                             double t) {
  RobotState s;
  const double th0 = start.yaw;
  const double th = th0 + cmd.omega * t;
  if (std::abs(cmd.omega) < kOmegaEps) {
    s.position = start.position +
                 t * Vec3(cmd.vx * std::cos(th0) - cmd.vy * std::sin(th0),
                          cmd.vx * std::sin(th0) + cmd.vy * std::cos(th0),
                          cmd.vz);
  } else {
    const double sd = std::sin(th) - std::sin(th0);
    const double cd = std::cos(th) - std::cos(th0);
    s.position = start.position + Vec3((cmd.vx * sd + cmd.vy * cd) / cmd.omega,
                                       (-cmd.vx * cd + cmd.vy * sd) / cmd.omega,
                                       cmd.vz * t);
  }
  s.yaw = normalize_angle(th);
  s.velocity = Vec3(cmd.vx * std::cos(th) - cmd.vy * std::sin(th),
                    cmd.vx * std::sin(th) + cmd.vy * std::cos(th), cmd.vz);
  s.yaw_rate = cmd.omega;
  return s;
}

RobotState MotionPrimitive::state_at(double t) const {
  if (t <= 0.0) return states.front();
  if (t >= duration) return states.back();
  if (stopping) {
    auto i = static_cast<std::size_t>(std::llround(t / dt));
    return states[std::min(i, states.size() - 1)];
  }
  return forward_arc_state(start, cmd, t);
}

MotionPrimitive forward_arc_primitive(const RobotState& start,
                                      const TwistCommand& cmd, double duration,
                                      double dt) {
  if (duration <= 0.0 || dt <= 0.0) {
    throw std::invalid_argument("forward_arc_primitive: non-positive duration/dt");
  }
  MotionPrimitive p;
  p.start = start;
  p.cmd = cmd;
  p.duration = duration;
  p.dt = dt;
  auto n = static_cast<std::size_t>(std::llround(duration / dt));
  p.states.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    p.states.push_back(forward_arc_state(start, cmd, static_cast<double>(i) * dt));
  }
  p.states.push_back(forward_arc_state(start, cmd, duration));
  return p;
}

namespace {

// Quintic ramp s(u) = 1 - (10u^3 - 15u^4 + 6u^5); s(0)=1, s(1)=0, zero end
// slope.  S(u) is its integral, S(1) = 1/2.
double ramp(double u) { return 1.0 - ((10.0 - (15.0 - 6.0 * u) * u) * u * u * u); }
double ramp_integral(double u) {
  return u - (2.5 - (3.0 - u) * u) * u * u * u * u;
}

}  // namespace

MotionPrimitive stopping_primitive(const RobotState& start, double duration,
                                   double dt) {
  if (duration <= 0.0 || dt <= 0.0) {
    throw std::invalid_argument("stopping_primitive: non-positive duration/dt");
  }
  MotionPrimitive p;
  p.start = start;
  p.duration = duration;
  p.dt = dt;
  p.stopping = true;

  // Recover the body-frame twist being ramped down.
  const double c0 = std::cos(start.yaw), s0 = std::sin(start.yaw);
  const double vx = c0 * start.velocity.x() + s0 * start.velocity.y();
  const double vy = -s0 * start.velocity.x() + c0 * start.velocity.y();
  const double vz = start.velocity.z();
  const double om = start.yaw_rate;
  p.cmd = {0.0, 0.0, 0.0, 0.0};  // commanded end twist

  auto n = static_cast<std::size_t>(std::llround(duration / dt));
  p.states.reserve(n + 1);

  // Heading is closed-form (theta = theta0 + om * duration * S(u)); position
  // integrates the ramped twist on a fine fixed grid for determinism.
  const int substeps = 20;
  const double h = dt / substeps;
  Vec3 pos = start.position;
  double t = 0.0;
  auto velocity_at = [&](double tq) {
    double u = tq / duration;
    double s = ramp(u);
    double th = start.yaw + om * duration * ramp_integral(u);
    return Vec3(s * (vx * std::cos(th) - vy * std::sin(th)),
                s * (vx * std::sin(th) + vy * std::cos(th)), s * vz);
  };
  auto record = [&](double tq, const Vec3& at) {
    RobotState s;
    double u = tq / duration;
    s.position = at;
    s.yaw = normalize_angle(start.yaw + om * duration * ramp_integral(u));
    s.velocity = tq >= duration ? Vec3::Zero() : velocity_at(tq);
    s.yaw_rate = tq >= duration ? 0.0 : ramp(u) * om;
    return s;
  };
  p.states.push_back(record(0.0, pos));
  for (std::size_t i = 1; i <= n; ++i) {
    double target = i == n ? duration : static_cast<double>(i) * dt;
    while (t < target - 1e-12) {
      double step = std::min(h, target - t);
      Vec3 v0 = velocity_at(t);
      Vec3 v1 = velocity_at(t + step);
      pos += 0.5 * step * (v0 + v1);
      t += step;
    }
    p.states.push_back(record(target, pos));
  }
  return p;
}

}  // namespace mcg
