#pragma once

#include <cstdint>
#include <vector>

#include "mcg/action_space.hpp"
#include "mcg/cave.hpp"
#include "mcg/observation.hpp"

namespace mcg {

/// Body-frame unit beam directions for a sensor:
///  - lidar: 360 azimuth steps (half-step offset) x 31 elevation rows over
///    [-30, +30] degrees;
///  - depth: 80 x 60 angular grid over an 87 x 58 degree field of view.
std::vector<Vec3> beam_directions(SensorKind kind);

SensorIntrinsics sensor_intrinsics(SensorKind kind);

/// Cast every beam from `pose` through the environment.  Ranges within
/// max_range get multiplicative Gaussian range noise (sigma relative per
/// meter, deterministic in `seed`); beams without a return within max_range
/// come back as +inf.
DepthObservation render_observation(const Environment& env, const Pose& pose,
                                    SensorKind kind, double max_range,
                                    double noise_sigma, std::uint64_t seed);

}  // namespace mcg
