#include "mcg/sensor.hpp"

#include <cmath>

namespace mcg {

namespace {

constexpr double kDeg = M_PI / 180.0;

Vec3 dir_from_angles(double az, double el) {
  return Vec3(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az),
              std::sin(el));
}

}  // namespace

SensorIntrinsics sensor_intrinsics(SensorKind kind) {
  if (kind == SensorKind::lidar) {
    return {360, 31, 2.0 * M_PI, 62.0 * kDeg};
  }
  return {80, 60, 87.0 * kDeg, 58.0 * kDeg};
}

std::vector<Vec3> beam_directions(SensorKind kind) {
  std::vector<Vec3> dirs;
  if (kind == SensorKind::lidar) {
    dirs.reserve(360 * 31);
    for (int row = 0; row < 31; ++row) {
      double el = (-30.0 + 2.0 * row) * kDeg;
      for (int col = 0; col < 360; ++col) {
        double az = (col + 0.5) * kDeg - M_PI;  // sample centers
        dirs.push_back(dir_from_angles(az, el));
      }
    }
  } else {
    SensorIntrinsics in = sensor_intrinsics(SensorKind::depth);
    dirs.reserve(static_cast<std::size_t>(in.width) * in.height);
    for (int row = 0; row < in.height; ++row) {
      double el = ((row + 0.5) / in.height - 0.5) * in.v_fov;
      for (int col = 0; col < in.width; ++col) {
        double az = ((col + 0.5) / in.width - 0.5) * in.h_fov;
        dirs.push_back(dir_from_angles(az, el));
      }
    }
  }
  return dirs;
}

DepthObservation render_observation(const Environment& env, const Pose& pose,
                                    SensorKind kind, double max_range,
                                    double noise_sigma, std::uint64_t seed) {
  if (!env.bounds.contains(pose.t)) {
    throw std::invalid_argument("render_observation: pose outside environment");
  }
  DepthObservation obs;
  obs.pose = pose;
  obs.pose.normalize();
  obs.intrinsics = sensor_intrinsics(kind);
  obs.dirs = beam_directions(kind);
  obs.ranges.resize(obs.dirs.size());
  const Mat3 R = pose.rotation();
  constexpr double inf = std::numeric_limits<double>::infinity();
  Rng rng(mix_seed(seed, 0x72656e64ull));
  for (std::size_t i = 0; i < obs.dirs.size(); ++i) {
    double t = env.raycast(pose.t, R * obs.dirs[i], max_range);
    if (t <= max_range) {
      if (noise_sigma > 0.0) {
        t = std::max(1e-3, t * (1.0 + noise_sigma * rng.normal()));
      }
      obs.ranges[i] = t;  // a noised return drifting past max_range reads free
    } else {
      obs.ranges[i] = inf;
    }
  }
  return obs;
}

}  // namespace mcg
