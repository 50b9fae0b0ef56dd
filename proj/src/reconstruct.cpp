#include "mcg/reconstruct.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace mcg {

namespace {

bool segment_hits_aabb(const Vec3& a, const Vec3& b, const Aabb& box) {
  double t0 = 0.0, t1 = 1.0;
  Vec3 d = b - a;
  for (int i = 0; i < 3; ++i) {
    if (d[i] == 0.0) {
      if (a[i] < box.min[i] || a[i] > box.max[i]) return false;
    } else {
      double ta = (box.min[i] - a[i]) / d[i];
      double tb = (box.max[i] - a[i]) / d[i];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 > t1) return false;
    }
  }
  return true;
}

// Integer index range of cells whose centers fall inside `region`.
struct CellRange {
  int lo[3];
  int hi[3];  // inclusive
  bool empty = false;
};

CellRange cell_range(const LocalGrid& g, const Aabb& region) {
  CellRange r;
  int dims[3] = {g.nx(), g.ny(), g.nz()};
  for (int i = 0; i < 3; ++i) {
    double lo = (region.min[i] - g.origin()[i]) / g.resolution() - 0.5;
    double hi = (region.max[i] - g.origin()[i]) / g.resolution() - 0.5;
    r.lo[i] = std::max(0, static_cast<int>(std::ceil(lo - 1e-9)));
    r.hi[i] = std::min(dims[i] - 1, static_cast<int>(std::floor(hi + 1e-9)));
    if (r.lo[i] > r.hi[i]) r.empty = true;
  }
  return r;
}

}  // namespace

std::uint64_t component_sample_count(const GaussianComponent& c,
                                     std::uint64_t support,
                                     const ReconstructionParams& params) {
  double expected = static_cast<double>(support) * c.weight;
  auto n = static_cast<std::uint64_t>(std::ceil(expected));
  return std::min<std::uint64_t>(n, params.max_samples_per_component);
}

std::uint64_t component_seed(std::uint64_t base_seed, std::uint32_t keyframe_id,
                             bool is_free, std::uint32_t comp_idx) {
  return mix_seed(base_seed, 2ull * keyframe_id + (is_free ? 1 : 0), comp_idx);
}

void apply_component_samples(LocalGrid& grid, const Aabb& region,
                             const Vec3& ray_origin,
                             const GaussianComponent& comp, bool is_free,
                             std::uint64_t support,
                             const ReconstructionParams& params,
                             std::uint64_t seed) {
  std::uint64_t n = component_sample_count(comp, support, params);
  if (n == 0) return;

  // Conservative component-level cull: rays stay within a few standard
  // deviations of the origin->mean segment.
  double sigma = std::sqrt(std::max(comp.cov.trace(), 0.0));
  double pad = 4.0 * sigma + grid.resolution();
  Aabb inflated{region.min - Vec3::Constant(pad), region.max + Vec3::Constant(pad)};
  if (!segment_hits_aabb(ray_origin, comp.mean, inflated)) return;

  Eigen::LLT<Mat3> llt(comp.cov);
  if (llt.info() != Eigen::Success) return;  // degenerate stored covariance
  Mat3 L = llt.matrixL();
  CellRange range = cell_range(grid, region);
  if (range.empty) return;
  const double l_hit = grid.ism().l_hit;
  const double l_miss = grid.ism().l_miss;

  Rng rng(seed);
  for (std::uint64_t s = 0; s < n; ++s) {
    Vec3 x = comp.mean + L * rng.normal3();
    if (!segment_hits_aabb(ray_origin, x, inflated)) continue;
    std::uint32_t end_idx = std::numeric_limits<std::uint32_t>::max();
    if (auto c = grid.cell_of(x)) end_idx = grid.index(c->x(), c->y(), c->z());
    traverse_ray(grid, ray_origin, x, [&](int ix, int iy, int iz) {
      if (ix < range.lo[0] || ix > range.hi[0] || iy < range.lo[1] ||
          iy > range.hi[1] || iz < range.lo[2] || iz > range.hi[2]) {
        return;
      }
      std::uint32_t idx = grid.index(ix, iy, iz);
      grid.add_log_odds(idx, !is_free && idx == end_idx ? l_hit : l_miss);
    });
  }
}

void integrate_keyframe(LocalGrid& grid, const Keyframe& kf,
                        const ReconstructionParams& params,
                        std::uint64_t base_seed) {
  Aabb region = grid.bounds();
  for (std::uint32_t i = 0; i < kf.occupied.components.size(); ++i) {
    apply_component_samples(grid, region, kf.origin.t, kf.occupied.components[i],
                            false, kf.occupied.support_size, params,
                            component_seed(base_seed, kf.id, false, i));
  }
  for (std::uint32_t i = 0; i < kf.free.components.size(); ++i) {
    apply_component_samples(grid, region, kf.origin.t, kf.free.components[i],
                            true, kf.free.support_size, params,
                            component_seed(base_seed, kf.id, true, i));
  }
}

void reconstruct_region(LocalGrid& grid, const Aabb& region, const GmmMap& map,
                        const ReconstructionParams& params,
                        std::uint64_t base_seed) {
  Aabb clipped = region.intersection(grid.bounds());
  if (clipped.empty()) return;
  double radius = 2.0 * params.max_range + 0.5 * (clipped.max - clipped.min).norm();
  auto refs = map.query_components(clipped.center(), radius);
  for (const auto& ref : refs) {
    const Keyframe& kf = map.keyframe(ref.keyframe_id);
    const Gmm& g = ref.is_free ? kf.free : kf.occupied;
    apply_component_samples(
        grid, clipped, kf.origin.t, g.components[ref.comp_idx], ref.is_free,
        g.support_size, params,
        component_seed(base_seed, ref.keyframe_id, ref.is_free, ref.comp_idx));
  }
}

LocalGrid shift_local_grid(const LocalGrid& grid, const Vec3& new_center,
                           const GmmMap& map, const ReconstructionParams& params,
                           std::uint64_t base_seed) {
  LocalGrid out = LocalGrid::centered(new_center, grid.nx(), grid.ny(),
                                      grid.nz(), grid.resolution(), grid.ism());
  if (out.origin() == grid.origin()) return grid;

  const double res = grid.resolution();
  Eigen::Vector3i off(
      static_cast<int>(std::llround((out.origin().x() - grid.origin().x()) / res)),
      static_cast<int>(std::llround((out.origin().y() - grid.origin().y()) / res)),
      static_cast<int>(std::llround((out.origin().z() - grid.origin().z()) / res)));
  for (int z = 0; z < out.nz(); ++z) {
    int sz = z + off.z();
    if (sz < 0 || sz >= grid.nz()) continue;
    for (int y = 0; y < out.ny(); ++y) {
      int sy = y + off.y();
      if (sy < 0 || sy >= grid.ny()) continue;
      for (int x = 0; x < out.nx(); ++x) {
        int sx = x + off.x();
        if (sx < 0 || sx >= grid.nx()) continue;
        out.raw(out.index(x, y, z)) = grid.at(grid.index(sx, sy, sz));
      }
    }
  }
  for (const Aabb& box : box_set_difference(out.bounds(), grid.bounds())) {
    reconstruct_region(out, box, map, params, base_seed);
  }
  return out;
}

}  // namespace mcg
