#include "mcg/observation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mcg {

namespace {

int window_of_dir(const Vec3& d, const SensorIntrinsics& in, int rows, int cols) {
  double az = std::atan2(d.y(), d.x());
  double el = std::asin(std::clamp(d.z() / d.norm(), -1.0, 1.0));
  double u = az / in.h_fov + 0.5;
  double v = el / in.v_fov + 0.5;
  int cu = std::clamp(static_cast<int>(std::floor(u * cols)), 0, cols - 1);
  int cv = std::clamp(static_cast<int>(std::floor(v * rows)), 0, rows - 1);
  return cv * cols + cu;
}

}  // namespace

SplitObservation split_observation(const DepthObservation& obs,
                                   const ObservationModel& model) {
  if (obs.dirs.size() != obs.ranges.size()) {
    throw std::invalid_argument("split_observation: dirs/ranges size mismatch");
  }
  SplitObservation out;
  Mat3 R = obs.pose.rotation();
  for (std::size_t i = 0; i < obs.dirs.size(); ++i) {
    double r = obs.ranges[i];
    if (r < model.max_range) {
      out.occupied.push_back(R * (obs.dirs[i] * r) + obs.pose.t);
    } else {
      out.free.push_back(R * (obs.dirs[i] * model.max_range) + obs.pose.t);
      out.free_window.push_back(window_of_dir(obs.dirs[i], obs.intrinsics,
                                              model.window_rows,
                                              model.window_cols));
    }
  }
  return out;
}

Gmm fit_free_space(const std::vector<Vec3>& free_points,
                   const std::vector<int>& windows,
                   const ObservationModel& model, std::uint64_t seed) {
  if (free_points.size() != windows.size()) {
    throw std::invalid_argument("fit_free_space: points/windows size mismatch");
  }
  Gmm folded;
  if (free_points.empty()) return folded;
  std::map<int, std::vector<Vec3>> by_window;
  for (std::size_t i = 0; i < free_points.size(); ++i) {
    by_window[windows[i]].push_back(free_points[i]);
  }
  for (const auto& [widx, pts] : by_window) {
    int m = std::min<int>(model.free_components_per_window,
                          static_cast<int>(pts.size()));
    EmResult fit = fit_em(pts, m, mix_seed(seed, 0x66726565u, widx), model.em);
    folded = merge_gmms(folded, fit.model);
  }
  return folded;
}

Keyframe fit_observation_keyframe(const DepthObservation& obs,
                                  const ObservationModel& model,
                                  std::uint64_t seed) {
  SplitObservation split = split_observation(obs, model);
  Keyframe kf;
  kf.origin = obs.pose;
  kf.origin.normalize();
  if (!split.occupied.empty()) {
    int m = std::min<int>(model.occupied_components,
                          static_cast<int>(split.occupied.size()));
    kf.occupied = fit_em(split.occupied, m, mix_seed(seed, 0x6f6363u), model.em).model;
  }
  kf.free = fit_free_space(split.free, split.free_window, model,
                           mix_seed(seed, 0x667370u));
  return kf;
}

}  // namespace mcg
