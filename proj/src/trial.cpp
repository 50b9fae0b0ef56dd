#include "mcg/trial.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mcg/action_space.hpp"
#include "mcg/beam_info.hpp"
#include "mcg/keyframe.hpp"
#include "mcg/observation.hpp"
#include "mcg/primitives.hpp"

namespace mcg {
namespace {

constexpr std::uint64_t kObsTag = 0x6f627365u;    // per-step render noise
constexpr std::uint64_t kFitTag = 0x6b66656du;    // per-keyframe EM
constexpr std::uint64_t kReconTag = 0x7265636eu;  // per-trial resampling base

// Origin the robot-centered window would snap to; lets the trial skip the
// grid copy entirely when the robot has not left the current lattice cell.
Vec3 snapped_origin(const Vec3& center, int nx, int ny, int nz, double res) {
  const int dims[3] = {nx, ny, nz};
  Vec3 origin;
  for (int i = 0; i < 3; ++i) {
    origin[i] = (std::round(center[i] / res) - dims[i] / 2) * res;
  }
  return origin;
}

// Mark the robot's current collision volume as free in the planner's view of
// the map.  The sensor can never observe the cells it is flying through (the
// beam fan has blind cones), but under ideal tracking the robot occupying a
// position is itself evidence that the position is collision-free.  Applied
// to a per-round copy only: the referee and the transmitted map never see it.
void carve_known_free(LocalGrid& g, const Vec3& center, double radius) {
  const double res = g.resolution();
  const double r2 = radius * radius;
  int lo[3], hi[3];
  const int dims[3] = {g.nx(), g.ny(), g.nz()};
  for (int i = 0; i < 3; ++i) {
    lo[i] = std::max(
        0, static_cast<int>(std::floor((center[i] - radius - g.origin()[i]) / res)));
    hi[i] = std::min(
        dims[i] - 1,
        static_cast<int>(std::floor((center[i] + radius - g.origin()[i]) / res)));
  }
  for (int iz = lo[2]; iz <= hi[2]; ++iz) {
    for (int iy = lo[1]; iy <= hi[1]; ++iy) {
      for (int ix = lo[0]; ix <= hi[0]; ++ix) {
        if ((g.center_of(ix, iy, iz) - center).squaredNorm() <= r2) {
          g.raw(g.index(ix, iy, iz)) = static_cast<float>(g.ism().clamp_min);
        }
      }
    }
  }
}

}  // namespace

const char* to_string(MapMode mode) {
  return mode == MapMode::mcg ? "mcg" : "og";
}

const char* to_string(SensorKind kind) {
  return kind == SensorKind::lidar ? "lidar" : "depth";
}

TrialResult run_trial(const Environment& env, const TrialConfig& cfg) {
  if (cfg.start_index < 0 ||
      static_cast<std::size_t>(cfg.start_index) >= env.start_positions.size()) {
    throw std::invalid_argument("run_trial: start index out of range");
  }
  if (cfg.duration_s < 0.0 || cfg.sensor_rate_hz <= 0.0) {
    throw std::invalid_argument("run_trial: bad duration or sensor rate");
  }
  const auto wall_start = std::chrono::steady_clock::now();

  const double r_d = cfg.observation.max_range;
  const SensorIntrinsics intr = sensor_intrinsics(cfg.sensor);
  const std::vector<Vec3> beams = beam_directions(cfg.sensor);

  GateConfig gate_cfg = cfg.gate;
  if (cfg.gate_auto) {
    gate_cfg.mode = cfg.sensor == SensorKind::lidar ? GateConfig::Mode::full_360
                                                    : GateConfig::Mode::limited_fov;
    gate_cfg.h_fov = intr.h_fov;
    gate_cfg.v_fov = intr.v_fov;
    gate_cfg.range = r_d;
  }
  KeyframeGate gate(gate_cfg);

  InverseSensorModel referee_ism;  // unclamped arbiter, shared by both modes
  referee_ism = referee_ism.unclamped();
  LocalGrid referee =
      LocalGrid::covering(env.bounds, cfg.referee_res, referee_ism);

  TrialResult result;
  result.metrics.mode = to_string(cfg.mode);
  result.metrics.sensor = to_string(cfg.sensor);
  result.metrics.seed = cfg.seed;
  result.metrics.start_index = cfg.start_index;

  const bool mcg_mode = cfg.mode == MapMode::mcg;
  LocalGrid local;
  if (cfg.build_direct_grid) {
    result.direct_grid =
        LocalGrid::covering(env.bounds, cfg.referee_res, referee_ism);
    result.has_direct_grid = true;
  }

  RobotState robot;
  robot.position = env.start_positions[static_cast<std::size_t>(cfg.start_index)];
  robot.yaw = 0.0;

  if (mcg_mode) {
    local = LocalGrid::centered(robot.position, cfg.local_nx, cfg.local_ny,
                                cfg.local_nz, cfg.local_res, cfg.local_ism);
  }

  const std::uint64_t recon_seed = mix_seed(cfg.seed, kReconTag, 0);
  const auto info = make_beam_information(cfg.beam_information);

  std::uint64_t bytes = 0;
  std::size_t kf_count = 0;

  auto push_row = [&](double t) {
    MetricsRow row;
    row.t_sec = t;
    row.entropy_bits = entropy_bits(referee);
    row.bytes_cum = bytes;
    row.position = robot.position;
    row.yaw = robot.yaw;
    result.metrics.rows.push_back(row);
  };
  push_row(0.0);

  const long steps = std::lround(cfg.duration_s * cfg.sensor_rate_hz);
  const long round_steps =
      std::max<long>(1, std::lround(cfg.planner.tau * cfg.sensor_rate_hz));
  const long rows_every = std::max<long>(1, std::lround(cfg.sensor_rate_hz));

  MotionPrimitive plan = stopping_primitive(robot, cfg.planner.tau, cfg.planner.dt);
  double round_start = 0.0;
  double last_feasible = 0.0;

  for (long i = 1; i <= steps; ++i) {
    const double t = static_cast<double>(i) / cfg.sensor_rate_hz;
    const double t_prev = static_cast<double>(i - 1) / cfg.sensor_rate_hz;

    if ((i - 1) % round_steps == 0) {
      round_start = t_prev;
      LocalGrid plan_grid =
          mcg_mode ? local
                   : window_copy(referee, robot.position, cfg.local_nx,
                                 cfg.local_ny, cfg.local_nz, cfg.local_ism);
      carve_known_free(plan_grid, robot.position,
                       cfg.planner.r_coll + 2.0 * cfg.local_res);
      const PlanningFields fields =
          make_planning_fields(plan_grid, cfg.frontier_delta, env.bounds);
      const std::vector<Mpl> space =
          build_action_space(robot, cfg.sensor, cfg.planner);
      const SelectionResult sel =
          select_action(robot, space, fields, beams, r_d, *info, cfg.planner);
      plan = sel.primitive;
      if (sel.any_feasible) {
        last_feasible = t_prev;
      } else if (t_prev - last_feasible > cfg.planner.watchdog_s) {
        result.metrics.status = "stuck";
        break;
      }
    }

    robot = plan.state_at(t - round_start);
    // Numerical hygiene: a stopping ramp begun at the very edge of the
    // exploration box could overshoot it by a whisker.
    robot.position =
        robot.position.cwiseMax(env.bounds.min + Vec3::Constant(1e-9))
            .cwiseMin(env.bounds.max - Vec3::Constant(1e-9));

    Pose sensor_pose;
    sensor_pose.t = robot.position;
    sensor_pose.yaw = robot.yaw;
    const DepthObservation obs =
        render_observation(env, sensor_pose, cfg.sensor, r_d, cfg.noise_sigma,
                           mix_seed(cfg.seed, kObsTag, static_cast<std::uint64_t>(i)));

    if (mcg_mode) {
      integrate_observation(referee, obs, r_d, nullptr);
      if (snapped_origin(robot.position, cfg.local_nx, cfg.local_ny, cfg.local_nz,
                         cfg.local_res) != local.origin()) {
        local = shift_local_grid(local, robot.position, result.map, cfg.recon,
                                 recon_seed);
      }
      if (gate.should_store(obs.pose)) {
        Keyframe kf = fit_observation_keyframe(
            obs, cfg.observation, mix_seed(cfg.seed, kFitTag, kf_count));
        kf.id = static_cast<std::uint32_t>(kf_count);
        bytes += keyframe_payload_bytes(kf);
        const std::vector<std::uint8_t> wire = serialize_keyframe(kf);
        result.keyframe_stream.insert(result.keyframe_stream.end(), wire.begin(),
                                      wire.end());
        result.map.insert(kf);
        gate.add(obs.pose);
        integrate_keyframe(local, kf, cfg.recon, recon_seed);
        if (result.has_direct_grid) {
          integrate_observation(result.direct_grid, obs, r_d, nullptr);
        }
        ++kf_count;
      }
    } else {
      Changeset changes;
      integrate_observation(referee, obs, r_d, &changes);
      bytes += 16 * static_cast<std::uint64_t>(changes.size());
    }

    if (i % rows_every == 0) push_row(t);
  }

  result.metrics.map_bytes = bytes;
  result.metrics.keyframe_count = kf_count;
  result.metrics.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start)
          .count();
  return result;
}

std::string metrics_csv(const TrialMetrics& metrics) {
  std::string out = "t_sec,entropy_bits,bytes_cum,x,y,z,yaw,mode,seed\n";
  char buf[256];
  for (const MetricsRow& row : metrics.rows) {
    std::snprintf(buf, sizeof(buf), "%.1f,%.6f,%llu,%.6f,%.6f,%.6f,%.6f,%s,%llu\n",
                  row.t_sec, row.entropy_bits,
                  static_cast<unsigned long long>(row.bytes_cum), row.position.x(),
                  row.position.y(), row.position.z(), row.yaw,
                  metrics.mode.c_str(),
                  static_cast<unsigned long long>(metrics.seed));
    out += buf;
  }
  return out;
}

}  // namespace mcg
