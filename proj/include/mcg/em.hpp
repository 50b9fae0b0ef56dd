#pragma once

#include <cstdint>
#include <vector>

#include "mcg/gmm.hpp"

namespace mcg {

struct EmParams {
  double mahal_gate = 5.0;    // gate radius in Mahalanobis units
  double cov_floor = 1e-6;    // eigenvalue floor for covariances
  double rel_tol = 1e-4;      // relative log-likelihood improvement cutoff
  int max_iter = 30;
  double prune_weight = 1e-6; // components below this weight are dropped
};

struct EmResult {
  Gmm model;
  /// Gated log-likelihood evaluated before each M-step (non-decreasing).
  std::vector<double> log_likelihood;
  /// Points that passed the Mahalanobis gate for at least one component.
  std::size_t retained = 0;
};

/// Fit an m-component mixture with k-means++ seeding and gated EM.  Point ->
/// component responsibilities are restricted to pairs within `mahal_gate` of
/// the *initial* component parameters; the mask is frozen across iterations.
/// Weights are renormalized over the retained points each M-step, so the gated
/// log-likelihood is monotone.  Throws std::invalid_argument when m < 1 or the
/// input has fewer points than components ("insufficient support").
EmResult fit_em(const std::vector<Vec3>& points, int m, std::uint64_t seed,
                const EmParams& params = {});

}  // namespace mcg
