#include "mcg/gating.hpp"

#include <cmath>

#include "mcg/hull.hpp"

namespace mcg {

FovPyramid make_fov_pyramid(const Pose& sensor_pose, double h_fov, double v_fov,
                            double range) {
  double y = range * std::tan(0.5 * h_fov);
  double z = range * std::tan(0.5 * v_fov);
  FovPyramid p;
  p.apex = sensor_pose.t;
  p.corners[0] = sensor_pose.apply(Vec3(range, y, z));
  p.corners[1] = sensor_pose.apply(Vec3(range, -y, z));
  p.corners[2] = sensor_pose.apply(Vec3(range, -y, -z));
  p.corners[3] = sensor_pose.apply(Vec3(range, y, -z));
  return p;
}

std::array<std::array<Vec3, 4>, 2> pyramid_tetrahedra(const FovPyramid& p) {
  return {{{p.apex, p.corners[0], p.corners[1], p.corners[2]},
           {p.apex, p.corners[0], p.corners[2], p.corners[3]}}};
}

double pyramid_volume(const FovPyramid& p) {
  auto t = pyramid_tetrahedra(p);
  return tetra_volume(t[0][0], t[0][1], t[0][2], t[0][3]) +
         tetra_volume(t[1][0], t[1][1], t[1][2], t[1][3]);
}

bool pyramid_contains(const FovPyramid& pyr, const Vec3& p, double eps) {
  Vec3 centroid = 0.2 * (pyr.apex + pyr.corners[0] + pyr.corners[1] +
                         pyr.corners[2] + pyr.corners[3]);
  // Four side planes through the apex plus the base plane.
  for (int i = 0; i < 4; ++i) {
    Vec3 a = pyr.corners[i], b = pyr.corners[(i + 1) % 4];
    Vec3 n = (a - pyr.apex).cross(b - pyr.apex);
    double d = n.dot(pyr.apex);
    if (n.dot(centroid) < d) {
      n = -n;
      d = -d;
    }
    if (n.dot(p) - d < -eps * n.norm()) return false;
  }
  Vec3 n = (pyr.corners[1] - pyr.corners[0]).cross(pyr.corners[2] - pyr.corners[0]);
  double d = n.dot(pyr.corners[0]);
  if (n.dot(centroid) < d) {
    n = -n;
    d = -d;
  }
  return n.dot(p) - d >= -eps * n.norm();
}

double pyramid_overlap_fraction(const FovPyramid& a, const FovPyramid& b) {
  auto ta = pyramid_tetrahedra(a);
  auto tb = pyramid_tetrahedra(b);
  std::vector<Vec3> pts;
  for (const auto& x : ta) {
    for (const auto& y : tb) {
      auto cand = tetra_intersection_points(x, y);
      pts.insert(pts.end(), cand.begin(), cand.end());
    }
  }
  if (pts.empty()) return 0.0;
  double vol = convex_hull_volume(pts);
  double base = pyramid_volume(a);
  if (base <= 0.0) return 0.0;
  double f = vol / base;
  if (f >= 1.0 - 1e-6) return 1.0;
  if (f <= 1e-12) return 0.0;
  return f;
}

bool KeyframeGate::should_store(const Pose& pose) const {
  if (cfg_.mode == GateConfig::Mode::full_360) {
    for (const Vec3& o : origins_) {
      Vec3 d = (o - pose.t).cwiseAbs();
      if (d.x() <= cfg_.half_extent.x() && d.y() <= cfg_.half_extent.y() &&
          d.z() <= cfg_.half_extent.z()) {
        return false;
      }
    }
    return true;
  }
  FovPyramid view = make_fov_pyramid(pose, cfg_.h_fov, cfg_.v_fov, cfg_.range);
  // Newest first: recent views are the likeliest to overlap, and any single
  // overlap at or above the threshold settles the answer.
  for (auto it = pyramids_.rbegin(); it != pyramids_.rend(); ++it) {
    if (pyramid_overlap_fraction(view, *it) >= cfg_.overlap_threshold) {
      return false;
    }
  }
  return true;
}

void KeyframeGate::add(const Pose& pose) {
  if (cfg_.mode == GateConfig::Mode::full_360) {
    origins_.push_back(pose.t);
  } else {
    pyramids_.push_back(make_fov_pyramid(pose, cfg_.h_fov, cfg_.v_fov, cfg_.range));
  }
}

}  // namespace mcg
