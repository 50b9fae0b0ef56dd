#pragma once

#include <cstdint>
#include <vector>

#include "mcg/em.hpp"
#include "mcg/geometry.hpp"
#include "mcg/keyframe.hpp"

namespace mcg {

/// Angular sensor grid: width x height beams spread over h_fov x v_fov
/// (azimuth/elevation, radians), centered on the sensor +x axis.
struct SensorIntrinsics {
  int width = 0;
  int height = 0;
  double h_fov = 0.0;
  double v_fov = 0.0;
};

/// One depth scan.  Beam directions are unit vectors in the sensor frame;
/// ranges are meters with +inf meaning no return within the sensor's reach.
struct DepthObservation {
  Pose pose;
  SensorIntrinsics intrinsics;
  std::vector<Vec3> dirs;
  std::vector<double> ranges;

  std::size_t size() const { return dirs.size(); }
};

/// Mixture-fitting configuration for one observation.
struct ObservationModel {
  double max_range = 5.0;               // r_d: occupied/free split distance
  int occupied_components = 100;        // cap, clamped to the point count
  int free_components_per_window = 2;   // per non-empty window
  int window_rows = 4;
  int window_cols = 4;
  EmParams em;
};

/// Beams shorter than max_range contribute world-frame occupied points (the
/// surface hits); beams at or beyond max_range contribute free points placed
/// at max_range along the beam.  window[i] gives the image-plane window of
/// free point i (row-major over window_rows x window_cols).
struct SplitObservation {
  std::vector<Vec3> occupied;
  std::vector<Vec3> free;
  std::vector<int> free_window;
};

SplitObservation split_observation(const DepthObservation& obs,
                                   const ObservationModel& model);

/// Fit free-space points window by window (min(free_components_per_window,
/// count) components each) and fold the per-window mixtures together with
/// support-weighted merges.  Support of the result equals the free point
/// count.  Empty input yields an empty mixture.
Gmm fit_free_space(const std::vector<Vec3>& free_points,
                   const std::vector<int>& windows,
                   const ObservationModel& model, std::uint64_t seed);

/// Full per-scan pipeline: split, fit occupied mixture, fit windowed free
/// mixture.  The keyframe id is left 0 for the caller to assign.
Keyframe fit_observation_keyframe(const DepthObservation& obs,
                                  const ObservationModel& model,
                                  std::uint64_t seed);

}  // namespace mcg
