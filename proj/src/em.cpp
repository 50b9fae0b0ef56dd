#include "mcg/em.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mcg {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Clamp covariance eigenvalues from below.  In the scatter's own eigenbasis
// this is the exact constrained M-step maximizer, which keeps the gated
// log-likelihood monotone even when the floor binds.
Mat3 floor_covariance(const Mat3& cov, double floor) {
  Mat3 sym = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<Mat3> es(sym);
  Vec3 ev = es.eigenvalues().cwiseMax(floor);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

EmResult fit_em(const std::vector<Vec3>& points, int m, std::uint64_t seed,
                const EmParams& params) {
  if (m < 1) throw std::invalid_argument("fit_em: component count must be >= 1");
  const std::size_t n = points.size();
  if (n < static_cast<std::size_t>(m)) {
    throw std::invalid_argument("fit_em: insufficient support");
  }

  Rng rng(seed);

  // k-means++ seeding; track each point's nearest seed for the initial
  // assignment and spread estimate.
  std::vector<std::size_t> seed_idx(m);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::vector<int> nearest(n, 0);
  seed_idx[0] = rng.uniform_index(n);
  for (int k = 0;; ++k) {
    const Vec3& s = points[seed_idx[k]];
    for (std::size_t i = 0; i < n; ++i) {
      double d = (points[i] - s).squaredNorm();
      if (d < d2[i]) {
        d2[i] = d;
        nearest[i] = k;
      }
    }
    if (k + 1 == m) break;
    double total = 0.0;
    for (double v : d2) total += v;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      std::size_t pick = n - 1;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (u < acc) {
          pick = i;
          break;
        }
      }
      seed_idx[k + 1] = pick;
    } else {
      seed_idx[k + 1] = rng.uniform_index(n);  // all remaining points coincide
    }
  }

  // Isotropic initial covariances from the per-cluster RMS spread.
  std::vector<double> count(m, 0.0), sum_d2(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    count[nearest[i]] += 1.0;
    sum_d2[nearest[i]] += d2[i];
  }
  double global_ms = 0.0;
  for (std::size_t i = 0; i < n; ++i) global_ms += d2[i];
  global_ms /= static_cast<double>(n);
  std::vector<double> axis_var(m);
  std::vector<Vec3> mu(m);
  std::vector<Mat3> cov(m);
  std::vector<double> weight(m);
  for (int k = 0; k < m; ++k) {
    double ms = count[k] > 0.0 ? sum_d2[k] / count[k] : global_ms;
    axis_var[k] = std::max(ms / 3.0, params.cov_floor);
    mu[k] = points[seed_idx[k]];
    cov[k] = axis_var[k] * Mat3::Identity();
    weight[k] = count[k] / static_cast<double>(n);
  }

  // Mahalanobis gate against the initial parameters, frozen for all
  // iterations.  Component-major layout (CSR) so the E-step can run batched.
  std::vector<std::vector<int>> member(m);
  std::vector<char> retained_mask(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < m; ++k) {
      double gate2 = params.mahal_gate * params.mahal_gate * axis_var[k];
      if ((points[i] - mu[k]).squaredNorm() <= gate2) {
        member[k].push_back(static_cast<int>(i));
        retained_mask[i] = 1;
      }
    }
  }
  std::size_t retained = 0;
  for (char c : retained_mask) retained += c;

  std::vector<Eigen::Matrix3Xd> pts(m);
  std::vector<Eigen::ArrayXd> vals(m);
  for (int k = 0; k < m; ++k) {
    pts[k].resize(3, member[k].size());
    for (std::size_t j = 0; j < member[k].size(); ++j) {
      pts[k].col(j) = points[member[k][j]];
    }
    vals[k].resize(member[k].size());
  }

  EmResult result;
  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<double> pt_max(n), pt_sum(n);

  for (int iter = 0; iter < params.max_iter; ++iter) {
    // E-step: per-component log(w * N(x)) over member points, then a
    // log-sum-exp normalization per point.
    std::fill(pt_max.begin(), pt_max.end(), neg_inf);
    std::fill(pt_sum.begin(), pt_sum.end(), 0.0);
    for (int k = 0; k < m; ++k) {
      if (weight[k] <= 0.0 || member[k].empty()) continue;
      Eigen::LLT<Mat3> llt(cov[k]);
      Mat3 L = llt.matrixL();
      double log_det = 2.0 * std::log(L.diagonal().prod());
      double base = std::log(weight[k]) - 0.5 * (log_det + 3.0 * kLog2Pi);
      Eigen::Matrix3Xd d = pts[k].colwise() - mu[k];
      Eigen::Matrix3Xd w = L.triangularView<Eigen::Lower>().solve(d);
      vals[k] = base - 0.5 * w.colwise().squaredNorm().transpose().array();
      for (std::size_t j = 0; j < member[k].size(); ++j) {
        double& mx = pt_max[member[k][j]];
        if (vals[k][j] > mx) mx = vals[k][j];
      }
    }
    for (int k = 0; k < m; ++k) {
      if (weight[k] <= 0.0 || member[k].empty()) continue;
      for (std::size_t j = 0; j < member[k].size(); ++j) {
        int i = member[k][j];
        vals[k][j] = std::exp(vals[k][j] - pt_max[i]);  // now the numerator
        pt_sum[i] += vals[k][j];
      }
    }
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (retained_mask[i]) ll += pt_max[i] + std::log(pt_sum[i]);
    }
    result.log_likelihood.push_back(ll);

    // M-step: weighted moments with weights renormalized over retained points.
    double denom = static_cast<double>(retained);
    for (int k = 0; k < m; ++k) {
      if (weight[k] <= 0.0 || member[k].empty()) {
        weight[k] = 0.0;
        continue;
      }
      Eigen::ArrayXd beta = vals[k];
      for (std::size_t j = 0; j < member[k].size(); ++j) {
        beta[j] /= pt_sum[member[k][j]];
      }
      double s0 = beta.sum();
      if (!(s0 > 1e-300)) {
        weight[k] = 0.0;
        continue;
      }
      Vec3 s1 = pts[k] * beta.matrix();
      mu[k] = s1 / s0;
      Eigen::Matrix3Xd d = pts[k].colwise() - mu[k];
      Mat3 scatter = (d.array().rowwise() * beta.transpose()).matrix() * d.transpose();
      cov[k] = floor_covariance(scatter / s0, params.cov_floor);
      weight[k] = s0 / denom;
    }

    if (result.log_likelihood.size() >= 2) {
      double prev = result.log_likelihood[result.log_likelihood.size() - 2];
      double delta = ll - prev;
      if (delta < params.rel_tol * (std::abs(prev) + 1e-12)) break;
    }
  }

  // Prune negligible components and renormalize; keep the heaviest one if
  // everything fell below the cutoff.
  Gmm model;
  model.support_size = n;
  double kept_mass = 0.0;
  int argmax = 0;
  for (int k = 1; k < m; ++k) {
    if (weight[k] > weight[argmax]) argmax = k;
  }
  for (int k = 0; k < m; ++k) {
    if (weight[k] >= params.prune_weight) {
      model.components.push_back({weight[k], mu[k], cov[k]});
      kept_mass += weight[k];
    }
  }
  if (model.components.empty()) {
    model.components.push_back({1.0, mu[argmax], cov[argmax]});
    kept_mass = 1.0;
  }
  for (auto& c : model.components) c.weight /= kept_mass;

  result.model = std::move(model);
  result.retained = retained;
  return result;
}

}  // namespace mcg
