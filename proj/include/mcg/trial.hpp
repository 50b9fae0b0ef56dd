#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcg/cave.hpp"
#include "mcg/gating.hpp"
#include "mcg/gmm_map.hpp"
#include "mcg/grid.hpp"
#include "mcg/planner.hpp"
#include "mcg/reconstruct.hpp"
#include "mcg/sensor.hpp"

namespace mcg {

enum class MapMode { mcg, og };

struct TrialConfig {
  MapMode mode = MapMode::mcg;
  SensorKind sensor = SensorKind::lidar;
  std::uint64_t seed = 1;
  double duration_s = 300.0;
  int start_index = 0;

  double sensor_rate_hz = 10.0;
  double noise_sigma = 0.01;  // relative range noise

  ObservationModel observation;
  ReconstructionParams recon;
  PlannerConfig planner;
  GateConfig gate;
  bool gate_auto = true;  // pick 360/fov gating from the sensor kind

  double local_res = 0.2;
  int local_nx = 100, local_ny = 100, local_nz = 40;
  InverseSensorModel local_ism;
  double referee_res = 0.2;
  double frontier_delta = 0.1;
  std::string beam_information = "csqmi";

  /// Also integrate the stored scans directly into a full-extent grid
  /// (fidelity oracle for reconstruction checks).
  bool build_direct_grid = false;
};

struct MetricsRow {
  double t_sec = 0.0;
  double entropy_bits = 0.0;
  std::uint64_t bytes_cum = 0;
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
};

struct TrialMetrics {
  std::vector<MetricsRow> rows;
  std::string status = "completed";  // or "stuck" (watchdog expired)
  std::string mode;
  std::string sensor;
  std::uint64_t seed = 0;
  int start_index = 0;
  std::uint64_t map_bytes = 0;
  std::size_t keyframe_count = 0;
  double wall_time_s = 0.0;
};

struct TrialResult {
  TrialMetrics metrics;
  GmmMap map;                               // stored keyframes (mcg mode)
  std::vector<std::uint8_t> keyframe_stream;
  LocalGrid direct_grid;                    // when build_direct_grid
  bool has_direct_grid = false;
};

/// Run one exploration trial.  Both modes integrate the raw observations
/// into the same full-extent unclamped referee grid; mcg additionally keeps
/// the keyframe pipeline and robot-centered resampled window, og counts the
/// referee changesets as its transmission cost.
TrialResult run_trial(const Environment& env, const TrialConfig& cfg);

/// Deterministic CSV dump: header
/// t_sec,entropy_bits,bytes_cum,x,y,z,yaw,mode,seed and one row per metric.
std::string metrics_csv(const TrialMetrics& metrics);

const char* to_string(MapMode mode);
const char* to_string(SensorKind kind);

}  // namespace mcg
