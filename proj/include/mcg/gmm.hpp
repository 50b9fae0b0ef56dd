#pragma once

#include <cstdint>
#include <vector>

#include "mcg/geometry.hpp"

namespace mcg {

struct GaussianComponent {
  double weight = 0.0;
  Vec3 mean = Vec3::Zero();
  Mat3 cov = Mat3::Identity();
};

/// Weighted 3-D Gaussian mixture plus the number of points it was trained on.
/// An empty mixture (no components, support 0) is a valid value.
struct Gmm {
  std::vector<GaussianComponent> components;
  std::uint64_t support_size = 0;

  bool empty() const { return components.empty(); }

  /// Mixture pdf at x.  Per-component terms are accumulated in sorted order
  /// so that mixtures holding the same component multiset evaluate to
  /// bit-identical values regardless of component order.
  double density(const Vec3& x) const;

  /// Draw n points (component choice by weight CDF, then Gaussian draw).
  /// Throws std::runtime_error on an empty model.
  std::vector<Vec3> sample(std::size_t n, std::uint64_t seed) const;
};

/// Support-weighted merge: weights scale by their source support over the
/// combined support, components are concatenated (a's first), supports add.
Gmm merge_gmms(const Gmm& a, const Gmm& b);

}  // namespace mcg
