#pragma once

#include <vector>

#include "mcg/action_space.hpp"
#include "mcg/beam_info.hpp"
#include "mcg/grid.hpp"

namespace mcg {

/// Everything a planning round reads: the robot-centered grid, distance
/// fields derived from it, and the exploration bounds positions must stay in.
struct PlanningFields {
  const LocalGrid* grid = nullptr;
  std::vector<float> obstacle_dist;  // EDT from occupied-or-unknown cells, m
  std::vector<float> frontier_dist;  // EDT from frontier cells, m
  Aabb bounds;
};

/// Build both distance fields: obstacles are occupied-or-unknown cells,
/// frontiers are free cells adjacent to unknown (clamped to `bounds`).
PlanningFields make_planning_fields(const LocalGrid& grid, double delta,
                                    const Aabb& bounds);

/// Every sampled state of the primitive and of its stopping extension
/// (started one planning round in, at min(tau, duration)) must stay inside
/// the bounds and keep obstacle clearance strictly above r_coll.
bool safety_check(const MotionPrimitive& prim, const PlanningFields& fields,
                  const PlannerConfig& cfg);

/// Sum of per-beam information over `csqmi_poses` poses spaced uniformly
/// along the primitive (k = 1 means the endpoint).  Beams are the body-frame
/// directions rotated by each pose's yaw, traversed to beam_range through the
/// grid with tri-state collapse (free 0, unknown 0.5, occupied 1).
double information_reward(const MotionPrimitive& prim,
                          const PlanningFields& fields,
                          const std::vector<Vec3>& beam_dirs, double beam_range,
                          const BeamInformation& info,
                          const PlannerConfig& cfg);

/// Frontier progress: distance-to-frontier at the start minus at the end.
/// Zero when either endpoint leaves the grid or no frontier is reachable.
double frontier_reward(const MotionPrimitive& prim, const PlanningFields& fields);

struct CandidateScore {
  int mpl_idx = 0;
  int prim_idx = 0;
  bool feasible = false;
  double information = 0.0;
  double frontier = 0.0;
};

struct SelectionResult {
  MotionPrimitive primitive;
  bool fallback = false;  // stopping primitive chosen (none feasible or no gain)
  bool any_feasible = false;
  int mpl_idx = -1;
  int prim_idx = -1;
  double reward = 0.0;
};

/// Score every candidate (infeasible ones are skipped and marked) -- exposed
/// separately from the argmax so scale-invariance and tie-breaking are
/// testable at the formula level.
std::vector<CandidateScore> score_action_space(
    const std::vector<Mpl>& space, const PlanningFields& fields,
    const std::vector<Vec3>& beam_dirs, double beam_range,
    const BeamInformation& info, const PlannerConfig& cfg);

/// argmax of  information + frontier_weight * frontier  over feasible
/// candidates, ties broken toward the lowest (mpl_idx, prim_idx).  Falls back
/// to a stopping primitive from `current` when nothing is feasible or the
/// best objective is not positive.
SelectionResult select_action(const RobotState& current,
                              const std::vector<Mpl>& space,
                              const PlanningFields& fields,
                              const std::vector<Vec3>& beam_dirs,
                              double beam_range, const BeamInformation& info,
                              const PlannerConfig& cfg);

}  // namespace mcg
