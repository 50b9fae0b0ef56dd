#pragma once

#include <limits>
#include <string>
#include <vector>

#include "mcg/geometry.hpp"

namespace mcg {

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Eigen::Vector3i> triangles;

  Aabb bounds() const;
};

/// ASCII OFF polygon files; non-triangle faces are fan-triangulated on load.
TriMesh load_mesh_off(const std::string& path);
void save_mesh_off(const TriMesh& mesh, const std::string& path);

/// Watertight-agnostic ray/triangle intersection (Moller-Trumbore).  Returns
/// the ray parameter t >= 0 for unit-speed `dir`, or +inf on a miss.
double ray_triangle(const Vec3& o, const Vec3& dir, const Vec3& v0,
                    const Vec3& v1, const Vec3& v2);

/// Static median-split BVH for nearest-hit queries.  Owns a copy of the mesh
/// so it stays valid independently of the source object's lifetime.
class Bvh {
 public:
  explicit Bvh(TriMesh mesh);

  /// Distance to the nearest triangle hit within t_max, or +inf.
  double raycast(const Vec3& o, const Vec3& dir, double t_max) const;

 private:
  struct Node {
    Vec3 lo, hi;
    std::int32_t left = -1;   // internal: child index; leaf: first triangle
    std::int32_t count = 0;   // leaf triangle count (0 for internal nodes)
    std::int32_t right = -1;
  };
  TriMesh mesh_;
  std::vector<Node> nodes_;
  std::vector<std::int32_t> tri_order_;

  std::int32_t build(std::vector<std::int32_t>& tris, std::size_t lo,
                     std::size_t hi, const std::vector<Vec3>& centroids);
};

}  // namespace mcg
