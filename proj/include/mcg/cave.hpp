#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "mcg/geometry.hpp"
#include "mcg/mesh.hpp"

namespace mcg {

struct CaveParams {
  Vec3 size = Vec3(20.0, 20.0, 4.0);
  double carve_res = 0.25;
  int chambers = 5;
  int extra_tunnels = 2;
  int start_count = 4;
  double min_start_clearance = 1.2;
  std::uint64_t seed = 1;
};

/// Simulation world: a triangle mesh for rendering plus, for generated caves,
/// the solid voxel mask it was extracted from (used as an exact fast path).
struct Environment {
  Aabb bounds;
  TriMesh mesh;
  std::vector<Vec3> start_positions;

  bool has_voxels = false;
  double voxel_res = 0.25;
  Vec3 voxel_origin = Vec3::Zero();
  int vx = 0, vy = 0, vz = 0;
  std::vector<std::uint8_t> solid;  // 1 = rock

  bool solid_at(int ix, int iy, int iz) const {
    if (ix < 0 || ix >= vx || iy < 0 || iy >= vy || iz < 0 || iz >= vz) {
      return true;  // outside the domain counts as rock
    }
    return solid[(static_cast<std::size_t>(iz) * vy + iy) * vx + ix] != 0;
  }

  /// Nearest surface along o + t*dir for t in (0, t_max]; +inf on a miss.
  /// Generated caves step the voxel mask (hit exactly at the entry face of
  /// the first solid voxel, which is where the extracted mesh lies); mesh
  /// worlds go through the BVH.
  double raycast(const Vec3& o, const Vec3& dir, double t_max) const;

  /// Force BVH ray-triangle casting even when voxels are available.
  double raycast_mesh(const Vec3& o, const Vec3& dir, double t_max) const;

  void build_bvh();  // call after mesh changes; raycast_mesh requires it

 private:
  std::shared_ptr<const Bvh> bvh_;
};

/// Deterministic procedural cave: ellipsoidal chambers connected by jittered
/// tunnels, carved out of solid rock, noise-roughened walls, a solid boundary
/// shell, and everything outside the largest connected free component filled
/// back in.  Start positions are free voxels with good clearance, spread
/// apart.  The surface mesh has two triangles per exposed voxel face.
Environment generate_cave(const CaveParams& params);

/// World from a mesh file plus explicit start positions.
Environment environment_from_mesh(TriMesh mesh, std::vector<Vec3> starts);

}  // namespace mcg
