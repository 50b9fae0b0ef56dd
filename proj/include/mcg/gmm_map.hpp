#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "mcg/keyframe.hpp"

namespace mcg {

/// Identifies one Gaussian component inside a stored keyframe.
struct ComponentRef {
  std::uint32_t keyframe_id = 0;
  bool is_free = false;
  std::uint32_t comp_idx = 0;
};

/// Append-only store of keyframes with a k-d tree over component means for
/// radius queries.  The tree is rebuilt on insert (inserts are bulk: one per
/// stored scan).
class GmmMap {
 public:
  /// Throws std::invalid_argument if the id is already present.
  void insert(Keyframe kf);

  const std::vector<Keyframe>& keyframes() const { return keyframes_; }
  bool contains(std::uint32_t id) const { return by_id_.count(id) != 0; }
  const Keyframe& keyframe(std::uint32_t id) const;
  std::size_t total_components() const { return means_.size(); }

  /// Components whose mean lies within `radius` (inclusive, Euclidean) of
  /// `center`, sorted by (keyframe_id, is_free, comp_idx).
  std::vector<ComponentRef> query_components(const Vec3& center,
                                             double radius) const;

  const GaussianComponent& component(const ComponentRef& ref) const;

 private:
  void radius_walk(std::size_t lo, std::size_t hi, int depth, const Vec3& c,
                   double r2, std::vector<ComponentRef>& out) const;

  std::vector<Keyframe> keyframes_;
  std::unordered_map<std::uint32_t, std::size_t> by_id_;
  std::vector<Vec3> means_;
  std::vector<ComponentRef> refs_;
  std::vector<std::uint32_t> order_;  // median-split kd layout over means_
};

}  // namespace mcg
