#pragma once

#include <cstdint>

#include "mcg/gmm_map.hpp"
#include "mcg/grid.hpp"

namespace mcg {

struct ReconstructionParams {
  double max_range = 5.0;                      // sensor reach
  std::size_t max_samples_per_component = 2000;
};

/// Number of points a component regenerates: ceil(support * weight), capped.
std::uint64_t component_sample_count(const GaussianComponent& c,
                                     std::uint64_t support,
                                     const ReconstructionParams& params);

/// Resample one stored component and raytrace the draws from the keyframe
/// origin, updating only cells whose centers lie inside `region`.  Occupied
/// components deposit misses along each ray and a hit in the sample's cell;
/// free components deposit misses everywhere including the endpoint.  The
/// sample set depends only on (seed), never on the region, so any region fill
/// is an exact restriction of a full rebuild.
void apply_component_samples(LocalGrid& grid, const Aabb& region,
                             const Vec3& ray_origin,
                             const GaussianComponent& comp, bool is_free,
                             std::uint64_t support,
                             const ReconstructionParams& params,
                             std::uint64_t seed);

/// Deterministic per-component resampling seed.
std::uint64_t component_seed(std::uint64_t base_seed, std::uint32_t keyframe_id,
                             bool is_free, std::uint32_t comp_idx);

/// Raytrace one keyframe's mixtures into the grid (region = whole grid).
/// Components are applied occupied-first in index order, matching the order a
/// full map reconstruction uses.
void integrate_keyframe(LocalGrid& grid, const Keyframe& kf,
                        const ReconstructionParams& params,
                        std::uint64_t base_seed);

/// Rebuild the cells of `region` from the stored map: radius query around the
/// region center (2 * max_range plus the region's half-diagonal), conservative
/// ray-box culling, then per-component resampling in (keyframe, occupied/free,
/// index) order.
void reconstruct_region(LocalGrid& grid, const Aabb& region, const GmmMap& map,
                        const ReconstructionParams& params,
                        std::uint64_t base_seed);

/// Re-center the sliding window on `new_center` (origin snaps to the lattice).
/// Overlapping cells are copied bit-for-bit; newly exposed cells are rebuilt
/// from the map region by region (at most three boxes for a translation).
LocalGrid shift_local_grid(const LocalGrid& grid, const Vec3& new_center,
                           const GmmMap& map, const ReconstructionParams& params,
                           std::uint64_t base_seed);

}  // namespace mcg
