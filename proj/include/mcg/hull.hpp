#pragma once

#include <array>
#include <vector>

#include "mcg/geometry.hpp"

namespace mcg {

double tetra_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

/// Volume of the convex hull of a point set (incremental quickhull).  Returns
/// 0 for degenerate (coplanar or smaller) inputs.
double convex_hull_volume(const std::vector<Vec3>& pts, double eps = 1e-9);

/// True when p lies inside (or within eps of) the tetrahedron.
bool tetra_contains(const std::array<Vec3, 4>& t, const Vec3& p,
                    double eps = 1e-9);

/// Vertices of the convex intersection of two tetrahedra: mutual vertex
/// containment plus each tetrahedron's edges clipped against the other's four
/// half-spaces.  May contain duplicates; callers hand the set to a hull.
std::vector<Vec3> tetra_intersection_points(const std::array<Vec3, 4>& a,
                                            const std::array<Vec3, 4>& b,
                                            double eps = 1e-9);

}  // namespace mcg
