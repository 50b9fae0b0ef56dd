#include "mcg/gmm_map.hpp"

#include <algorithm>
#include <stdexcept>

namespace mcg {

void GmmMap::insert(Keyframe kf) {
  if (by_id_.count(kf.id)) {
    throw std::invalid_argument("GmmMap::insert: duplicate keyframe id");
  }
  by_id_[kf.id] = keyframes_.size();
  for (std::uint32_t i = 0; i < kf.occupied.components.size(); ++i) {
    means_.push_back(kf.occupied.components[i].mean);
    refs_.push_back({kf.id, false, i});
  }
  for (std::uint32_t i = 0; i < kf.free.components.size(); ++i) {
    means_.push_back(kf.free.components[i].mean);
    refs_.push_back({kf.id, true, i});
  }
  keyframes_.push_back(std::move(kf));

  // Rebuild the kd layout: recursive median split, axis cycling with depth.
  order_.resize(means_.size());
  for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
  struct Span {
    std::size_t lo, hi;
    int depth;
  };
  std::vector<Span> stack{{0, order_.size(), 0}};
  while (!stack.empty()) {
    auto [lo, hi, depth] = stack.back();
    stack.pop_back();
    if (hi - lo <= 1) continue;
    std::size_t mid = lo + (hi - lo) / 2;
    int axis = depth % 3;
    std::nth_element(order_.begin() + lo, order_.begin() + mid,
                     order_.begin() + hi,
                     [&](std::uint32_t a, std::uint32_t b) {
                       return means_[a][axis] < means_[b][axis];
                     });
    stack.push_back({lo, mid, depth + 1});
    stack.push_back({mid + 1, hi, depth + 1});
  }
}

const Keyframe& GmmMap::keyframe(std::uint32_t id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) {
    throw std::invalid_argument("GmmMap::keyframe: unknown id");
  }
  return keyframes_[it->second];
}

const GaussianComponent& GmmMap::component(const ComponentRef& ref) const {
  const Keyframe& kf = keyframe(ref.keyframe_id);
  const Gmm& g = ref.is_free ? kf.free : kf.occupied;
  if (ref.comp_idx >= g.components.size()) {
    throw std::invalid_argument("GmmMap::component: index out of range");
  }
  return g.components[ref.comp_idx];
}

void GmmMap::radius_walk(std::size_t lo, std::size_t hi, int depth,
                         const Vec3& c, double r2,
                         std::vector<ComponentRef>& out) const {
  if (lo >= hi) return;
  std::size_t mid = lo + (hi - lo) / 2;
  const Vec3& p = means_[order_[mid]];
  if ((p - c).squaredNorm() <= r2) out.push_back(refs_[order_[mid]]);
  int axis = depth % 3;
  double d = c[axis] - p[axis];
  if (d * d <= r2 || d < 0.0) radius_walk(lo, mid, depth + 1, c, r2, out);
  if (d * d <= r2 || d > 0.0) radius_walk(mid + 1, hi, depth + 1, c, r2, out);
}

std::vector<ComponentRef> GmmMap::query_components(const Vec3& center,
                                                   double radius) const {
  std::vector<ComponentRef> out;
  if (radius < 0.0) return out;
  radius_walk(0, order_.size(), 0, center, radius * radius, out);
  std::sort(out.begin(), out.end(), [](const ComponentRef& a, const ComponentRef& b) {
    if (a.keyframe_id != b.keyframe_id) return a.keyframe_id < b.keyframe_id;
    if (a.is_free != b.is_free) return a.is_free < b.is_free;
    return a.comp_idx < b.comp_idx;
  });
  return out;
}

}  // namespace mcg
