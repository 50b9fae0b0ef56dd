#pragma once

#include <array>
#include <vector>

#include "mcg/geometry.hpp"

namespace mcg {

/// Rectangular view frustum of a limited field-of-view sensor, truncated at
/// the sensor's reach: apex at the optical center, four base corners at
/// `range` forward.  Corners loop (+y,+z), (-y,+z), (-y,-z), (+y,-z) in the
/// body frame.
struct FovPyramid {
  Vec3 apex = Vec3::Zero();
  std::array<Vec3, 4> corners;
};

FovPyramid make_fov_pyramid(const Pose& sensor_pose, double h_fov, double v_fov,
                            double range);

double pyramid_volume(const FovPyramid& p);

/// True when p lies inside the pyramid (all five bounding half-spaces).
bool pyramid_contains(const FovPyramid& pyr, const Vec3& p, double eps = 1e-9);

/// Split into the two tetrahedra sharing the base diagonal corner0-corner2.
std::array<std::array<Vec3, 4>, 2> pyramid_tetrahedra(const FovPyramid& p);

/// Overlap volume fraction in [0, 1]: volume of the convex intersection
/// (hull of the four tetra-pair intersections) over the volume of `a`.
/// Snapped to exactly 1 when the volumes agree within 1e-6 relative, and to
/// exactly 0 below 1e-12.
double pyramid_overlap_fraction(const FovPyramid& a, const FovPyramid& b);

/// Decides which observations are worth storing.
struct GateConfig {
  enum class Mode { full_360, limited_fov };
  Mode mode = Mode::full_360;
  // full_360: store unless a stored origin falls inside the pose-centered box.
  Vec3 half_extent = Vec3(0.5, 0.5, 0.5);
  // limited_fov: store while the best overlap with stored views is below this.
  double overlap_threshold = 0.5;
  double h_fov = 0.0;
  double v_fov = 0.0;
  double range = 5.0;
};

class KeyframeGate {
 public:
  explicit KeyframeGate(const GateConfig& cfg) : cfg_(cfg) {}

  /// True when the view from `pose` is novel enough to store.  An empty gate
  /// always stores.
  bool should_store(const Pose& pose) const;

  /// Record a stored pose.
  void add(const Pose& pose);

  std::size_t size() const { return origins_.size(); }

 private:
  GateConfig cfg_;
  std::vector<Vec3> origins_;
  std::vector<FovPyramid> pyramids_;
};

}  // namespace mcg
