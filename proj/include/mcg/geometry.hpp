#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cstdint>
#include <vector>

namespace mcg {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Wrap an angle into (-pi, pi].
double normalize_angle(double a);

/// Axis-aligned box, closed on min, open-ish on max for grid math but treated
/// as a solid interval for volume/intersection purposes.
struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  static Aabb from_center(const Vec3& center, const Vec3& half_extent) {
    return {center - half_extent, center + half_extent};
  }

  bool empty() const {
    return min.x() >= max.x() || min.y() >= max.y() || min.z() >= max.z();
  }
  double volume() const {
    if (empty()) return 0.0;
    return (max - min).prod();
  }
  bool contains(const Vec3& p) const {
    return p.x() >= min.x() && p.x() <= max.x() && p.y() >= min.y() &&
           p.y() <= max.y() && p.z() >= min.z() && p.z() <= max.z();
  }
  Aabb intersection(const Aabb& o) const {
    return {min.cwiseMax(o.min), max.cwiseMin(o.max)};
  }
  bool intersects(const Aabb& o) const { return !intersection(o).empty(); }
  Vec3 center() const { return 0.5 * (min + max); }
};

/// Decompose b_new \ b_old into disjoint axis-aligned boxes (fixed x, then y,
/// then z slab order).  Pure translations of a box produce at most three
/// non-empty pieces; the general case produces at most six.
std::vector<Aabb> box_set_difference(const Aabb& b_new, const Aabb& b_old);

/// Rigid transform stored as translation + roll/pitch/yaw (radians, ZYX
/// convention, each normalized to (-pi, pi]).
struct Pose {
  Vec3 t = Vec3::Zero();
  double roll = 0.0, pitch = 0.0, yaw = 0.0;

  Mat3 rotation() const {
    return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
            Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
            Eigen::AngleAxisd(roll, Vec3::UnitX()))
        .toRotationMatrix();
  }
  Vec3 apply(const Vec3& p_body) const { return rotation() * p_body + t; }
  void normalize() {
    roll = normalize_angle(roll);
    pitch = normalize_angle(pitch);
    yaw = normalize_angle(yaw);
  }
};

/// Deterministic 64-bit stream mixer for deriving independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0x9e3779b97f4a7c15ULL,
                       std::uint64_t c = 0xbf58476d1ce4e5b9ULL);

/// Small seeded generator (splitmix64 core) with the handful of draws the
/// library needs.  Kept self-contained so serialized runs replay bit-exactly
/// regardless of the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x853c49e6748fea9bULL) {}

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);
  /// Standard normal (Box-Muller, cached spare).
  double normal();
  Vec3 normal3() { return Vec3(normal(), normal(), normal()); }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mcg
