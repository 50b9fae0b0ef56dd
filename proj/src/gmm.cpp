#include "mcg/gmm.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcg {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)
}

double Gmm::density(const Vec3& x) const {
  std::vector<double> terms;
  terms.reserve(components.size());
  for (const auto& c : components) {
    Eigen::LLT<Mat3> llt(c.cov);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("gmm density: non-PD covariance");
    }
    Mat3 L = llt.matrixL();
    Vec3 d = llt.matrixL().solve(x - c.mean);
    double log_det = 2.0 * std::log(L.diagonal().prod());
    double log_n = -0.5 * (d.squaredNorm() + log_det + 3.0 * kLog2Pi);
    terms.push_back(c.weight * std::exp(log_n));
  }
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum;
}

std::vector<Vec3> Gmm::sample(std::size_t n, std::uint64_t seed) const {
  if (components.empty()) {
    throw std::runtime_error("gmm sample: empty model");
  }
  std::vector<double> cdf(components.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < components.size(); ++i) {
    acc += components[i].weight;
    cdf[i] = acc;
  }
  std::vector<Mat3> chol(components.size());
  for (std::size_t i = 0; i < components.size(); ++i) {
    Eigen::LLT<Mat3> llt(components[i].cov);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("gmm sample: non-PD covariance");
    }
    chol[i] = llt.matrixL();
  }
  Rng rng(seed);
  std::vector<Vec3> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    double u = rng.uniform() * acc;
    std::size_t i = std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
    if (i >= components.size()) i = components.size() - 1;
    out.push_back(components[i].mean + chol[i] * rng.normal3());
  }
  return out;
}

Gmm merge_gmms(const Gmm& a, const Gmm& b) {
  Gmm out;
  std::uint64_t n_star = a.support_size + b.support_size;
  out.support_size = n_star;
  if (n_star == 0) return out;
  double na = static_cast<double>(a.support_size);
  double nb = static_cast<double>(b.support_size);
  double ns = static_cast<double>(n_star);
  out.components.reserve(a.components.size() + b.components.size());
  for (const auto& c : a.components) {
    out.components.push_back({na * c.weight / ns, c.mean, c.cov});
  }
  for (const auto& c : b.components) {
    out.components.push_back({nb * c.weight / ns, c.mean, c.cov});
  }
  return out;
}

}  // namespace mcg
