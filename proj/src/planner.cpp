#include "mcg/planner.hpp"

#include <cmath>

#include "mcg/edt.hpp"

namespace mcg {

PlanningFields make_planning_fields(const LocalGrid& grid, double delta,
                                    const Aabb& bounds) {
  PlanningFields f;
  f.grid = &grid;
  f.bounds = bounds;
  std::vector<std::uint8_t> obstacle(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double l = grid.at(static_cast<std::uint32_t>(i));
    if (l > -delta) obstacle[i] = 1;  // occupied or unknown
  }
  f.obstacle_dist = distance_field_m(grid.nx(), grid.ny(), grid.nz(),
                                     grid.resolution(), obstacle);
  std::vector<std::uint8_t> frontier(grid.size(), 0);
  for (std::uint32_t idx : frontier_cells(grid, delta, &bounds)) {
    frontier[idx] = 1;
  }
  f.frontier_dist = distance_field_m(grid.nx(), grid.ny(), grid.nz(),
                                     grid.resolution(), frontier);
  return f;
}

namespace {

bool state_safe(const RobotState& s, const PlanningFields& fields,
                const PlannerConfig& cfg) {
  if (!fields.bounds.contains(s.position)) return false;
  auto cell = fields.grid->cell_of(s.position);
  if (!cell) return false;
  std::uint32_t idx = fields.grid->index(cell->x(), cell->y(), cell->z());
  return fields.obstacle_dist[idx] > cfg.r_coll;
}

}  // namespace

bool safety_check(const MotionPrimitive& prim, const PlanningFields& fields,
                  const PlannerConfig& cfg) {
  for (const RobotState& s : prim.states) {
    if (!state_safe(s, fields, cfg)) return false;
  }
  if (!prim.stopping) {
    double t_stop = std::min(cfg.tau, prim.duration);
    MotionPrimitive stop =
        stopping_primitive(prim.state_at(t_stop), cfg.tau, cfg.dt);
    for (const RobotState& s : stop.states) {
      if (!state_safe(s, fields, cfg)) return false;
    }
  }
  return true;
}

double information_reward(const MotionPrimitive& prim,
                          const PlanningFields& fields,
                          const std::vector<Vec3>& beam_dirs, double beam_range,
                          const BeamInformation& info,
                          const PlannerConfig& cfg) {
  const LocalGrid& grid = *fields.grid;
  double total = 0.0;
  std::vector<double> q;
  q.reserve(256);
  const int k = std::max(1, cfg.csqmi_poses);
  for (int i = 1; i <= k; ++i) {
    RobotState s = prim.state_at(prim.duration * i / k);
    const double cy = std::cos(s.yaw), sy = std::sin(s.yaw);
    for (const Vec3& d : beam_dirs) {
      Vec3 dw(cy * d.x() - sy * d.y(), sy * d.x() + cy * d.y(), d.z());
      Vec3 end = s.position + beam_range * dw;
      q.clear();
      traverse_ray(grid, s.position, end, [&](int ix, int iy, int iz) {
        int ts = tri_state(grid.at(grid.index(ix, iy, iz)), cfg.unknown_delta);
        q.push_back(ts > 0 ? 1.0 : (ts < 0 ? 0.0 : 0.5));
      });
      total += info.beam_info(q);
    }
  }
  return total;
}

double frontier_reward(const MotionPrimitive& prim, const PlanningFields& fields) {
  const LocalGrid& grid = *fields.grid;
  auto c0 = grid.cell_of(prim.states.front().position);
  auto c1 = grid.cell_of(prim.states.back().position);
  if (!c0 || !c1) return 0.0;
  double d0 = fields.frontier_dist[grid.index(c0->x(), c0->y(), c0->z())];
  double d1 = fields.frontier_dist[grid.index(c1->x(), c1->y(), c1->z())];
  if (!std::isfinite(d0) || !std::isfinite(d1)) return 0.0;
  return d0 - d1;
}

std::vector<CandidateScore> score_action_space(
    const std::vector<Mpl>& space, const PlanningFields& fields,
    const std::vector<Vec3>& beam_dirs, double beam_range,
    const BeamInformation& info, const PlannerConfig& cfg) {
  std::vector<CandidateScore> out;
  for (std::size_t mi = 0; mi < space.size(); ++mi) {
    for (std::size_t pi = 0; pi < space[mi].primitives.size(); ++pi) {
      CandidateScore sc;
      sc.mpl_idx = static_cast<int>(mi);
      sc.prim_idx = static_cast<int>(pi);
      const MotionPrimitive& prim = space[mi].primitives[pi];
      sc.feasible = safety_check(prim, fields, cfg);
      if (sc.feasible) {
        sc.information =
            information_reward(prim, fields, beam_dirs, beam_range, info, cfg);
        sc.frontier = frontier_reward(prim, fields);
      }
      out.push_back(sc);
    }
  }
  return out;
}

SelectionResult select_action(const RobotState& current,
                              const std::vector<Mpl>& space,
                              const PlanningFields& fields,
                              const std::vector<Vec3>& beam_dirs,
                              double beam_range, const BeamInformation& info,
                              const PlannerConfig& cfg) {
  SelectionResult res;
  auto scores =
      score_action_space(space, fields, beam_dirs, beam_range, info, cfg);
  double best = 0.0;
  for (const CandidateScore& sc : scores) {
    if (!sc.feasible) continue;
    res.any_feasible = true;
    double obj = sc.information + cfg.frontier_weight * sc.frontier;
    // Strict improvement; scan order already favors lower (mpl, prim) ids.
    if (res.mpl_idx < 0 || obj > best) {
      best = obj;
      res.mpl_idx = sc.mpl_idx;
      res.prim_idx = sc.prim_idx;
    }
  }
  if (res.mpl_idx >= 0 && best > 0.0) {
    res.primitive = space[res.mpl_idx].primitives[res.prim_idx];
    res.reward = best;
    return res;
  }
  // Nothing feasible, or exploring gains nothing: ramp down to a stop.
  res.primitive = stopping_primitive(current, cfg.tau, cfg.dt);
  res.fallback = true;
  res.mpl_idx = -1;
  res.prim_idx = -1;
  res.reward = 0.0;
  return res;
}

}  // namespace mcg
