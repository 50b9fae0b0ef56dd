#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "mcg/em.hpp"
#include "mcg/observation.hpp"

using namespace mcg;

namespace {

std::vector<Vec3> blob(Rng& rng, const Vec3& center, double sigma, int n) {
  std::vector<Vec3> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) pts.push_back(center + sigma * rng.normal3());
  return pts;
}

void check_model_invariants(const Gmm& g, const EmParams& params) {
  REQUIRE(!g.components.empty());
  double wsum = 0.0;
  for (const auto& c : g.components) {
    CHECK(c.weight > 0.0);
    CHECK(std::isfinite(c.weight));
    CHECK(c.mean.allFinite());
    wsum += c.weight;
    Eigen::SelfAdjointEigenSolver<Mat3> es(c.cov);
    CHECK(es.eigenvalues().minCoeff() >= params.cov_floor * (1.0 - 1e-9));
    CHECK((c.cov - c.cov.transpose()).norm() < 1e-12);
  }
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-9));
}

}  // namespace

TEST_CASE("fit_em rejects bad inputs") {
  std::vector<Vec3> pts = {{0, 0, 0}, {1, 1, 1}};
  CHECK_THROWS_AS((void)fit_em(pts, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)fit_em(pts, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)fit_em({}, 1, 1), std::invalid_argument);
}

TEST_CASE("gated log-likelihood is monotone non-decreasing over 100 fits") {
  Rng rng(100);
  EmParams params;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Vec3> pts;
    const int clusters = 1 + static_cast<int>(rng.uniform_index(4));
    for (int c = 0; c < clusters; ++c) {
      Vec3 center(rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4));
      auto b = blob(rng, center, rng.uniform(0.05, 0.5),
                    30 + static_cast<int>(rng.uniform_index(60)));
      pts.insert(pts.end(), b.begin(), b.end());
    }
    const int m = 1 + static_cast<int>(rng.uniform_index(6));
    EmResult res = fit_em(pts, m, 1000 + trial, params);
    REQUIRE(!res.log_likelihood.empty());
    for (std::size_t i = 1; i < res.log_likelihood.size(); ++i) {
      CHECK(res.log_likelihood[i] >=
            res.log_likelihood[i - 1] - 1e-9 * std::abs(res.log_likelihood[i - 1]));
    }
    CHECK(res.retained > 0);
    CHECK(res.retained <= pts.size());
    check_model_invariants(res.model, params);
    CHECK(res.model.support_size == pts.size());
  }
}

TEST_CASE("two separated clusters are recovered within 0.1 m") {
  Rng rng(200);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 c0(-2.0, 0.0, 0.0), c1(2.0, 1.0, -0.5);
    auto pts = blob(rng, c0, 0.15, 400);
    auto b1 = blob(rng, c1, 0.15, 400);
    pts.insert(pts.end(), b1.begin(), b1.end());
    EmResult res = fit_em(pts, 2, 7000 + trial);
    REQUIRE(res.model.components.size() == 2);
    const Vec3 m0 = res.model.components[0].mean;
    const Vec3 m1 = res.model.components[1].mean;
    const double direct = (m0 - c0).norm() + (m1 - c1).norm();
    const double crossed = (m0 - c1).norm() + (m1 - c0).norm();
    if (direct < crossed) {
      CHECK((m0 - c0).norm() < 0.1);
      CHECK((m1 - c1).norm() < 0.1);
    } else {
      CHECK((m0 - c1).norm() < 0.1);
      CHECK((m1 - c0).norm() < 0.1);
    }
    CHECK(res.model.components[0].weight == doctest::Approx(0.5).epsilon(0.1));
  }
}

TEST_CASE("identical points collapse to a floored covariance, not a crash") {
  std::vector<Vec3> pts(50, Vec3(1.0, 2.0, 3.0));
  EmParams params;
  EmResult res = fit_em(pts, 1, 3, params);
  REQUIRE(res.model.components.size() == 1);
  const auto& c = res.model.components[0];
  CHECK((c.mean - Vec3(1.0, 2.0, 3.0)).norm() < 1e-9);
  Eigen::SelfAdjointEigenSolver<Mat3> es(c.cov);
  CHECK(es.eigenvalues().minCoeff() == doctest::Approx(params.cov_floor));
  CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(params.cov_floor));
  CHECK(c.weight == doctest::Approx(1.0));
}

TEST_CASE("fit is deterministic in the seed") {
  Rng rng(300);
  auto pts = blob(rng, Vec3(0, 0, 0), 0.5, 200);
  EmResult a = fit_em(pts, 4, 42);
  EmResult b = fit_em(pts, 4, 42);
  REQUIRE(a.model.components.size() == b.model.components.size());
  for (std::size_t i = 0; i < a.model.components.size(); ++i) {
    CHECK(a.model.components[i].weight == b.model.components[i].weight);
    CHECK(a.model.components[i].mean == b.model.components[i].mean);
    CHECK(a.model.components[i].cov == b.model.components[i].cov);
  }
  EmResult c = fit_em(pts, 4, 43);  // different seed may land elsewhere
  CHECK(c.model.components.size() >= 1);
}

// --- observation splitting / free-space fitting -----------------------------

namespace {

DepthObservation make_obs(const std::vector<Vec3>& dirs,
                          const std::vector<double>& ranges) {
  DepthObservation obs;
  obs.intrinsics = {4, 4, M_PI / 2.0, M_PI / 2.0};
  obs.dirs = dirs;
  obs.ranges = ranges;
  return obs;
}

}  // namespace

TEST_CASE("split_observation: short returns are occupied, long ones free at "
          "max range") {
  ObservationModel model;
  model.max_range = 5.0;
  const Vec3 fwd(1, 0, 0);
  DepthObservation obs = make_obs(
      {fwd, fwd, fwd}, {2.0, 5.0, std::numeric_limits<double>::infinity()});
  obs.pose.t = Vec3(10, 0, 0);
  SplitObservation split = split_observation(obs, model);
  REQUIRE(split.occupied.size() == 1);
  REQUIRE(split.free.size() == 2);
  CHECK((split.occupied[0] - Vec3(12, 0, 0)).norm() < 1e-12);
  CHECK((split.free[0] - Vec3(15, 0, 0)).norm() < 1e-12);
  CHECK((split.free[1] - Vec3(15, 0, 0)).norm() < 1e-12);
  CHECK(split.free_window.size() == 2);
  for (int w : split.free_window) {
    CHECK(w >= 0);
    CHECK(w < model.window_rows * model.window_cols);
  }
}

TEST_CASE("fit_free_space: support equals the free point count; empty input "
          "gives an empty mixture") {
  ObservationModel model;
  Rng rng(400);
  std::vector<Vec3> pts;
  std::vector<int> windows;
  for (int i = 0; i < 120; ++i) {
    pts.push_back(Vec3(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-1, 1)));
    windows.push_back(static_cast<int>(rng.uniform_index(16)));
  }
  Gmm g = fit_free_space(pts, windows, model, 9);
  CHECK(g.support_size == pts.size());
  CHECK(!g.components.empty());
  double wsum = 0.0;
  for (const auto& c : g.components) wsum += c.weight;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-9));

  Gmm empty = fit_free_space({}, {}, model, 9);
  CHECK(empty.empty());
  CHECK(empty.support_size == 0);
}

TEST_CASE("fit_observation_keyframe assembles both mixtures with supports "
          "matching the split") {
  Rng rng(500);
  std::vector<Vec3> dirs;
  std::vector<double> ranges;
  for (int i = 0; i < 300; ++i) {
    Vec3 d(rng.uniform(0.2, 1.0), rng.uniform(-0.5, 0.5), rng.uniform(-0.3, 0.3));
    dirs.push_back(d.normalized());
    ranges.push_back(i % 3 == 0 ? std::numeric_limits<double>::infinity()
                                : rng.uniform(0.5, 4.5));
  }
  DepthObservation obs = make_obs(dirs, ranges);
  obs.intrinsics = {20, 15, 1.5, 1.0};
  ObservationModel model;
  model.occupied_components = 10;
  Keyframe kf = fit_observation_keyframe(obs, model, 77);
  SplitObservation split = split_observation(obs, model);
  CHECK(kf.occupied.support_size == split.occupied.size());
  CHECK(kf.free.support_size == split.free.size());
  CHECK(kf.occupied.components.size() == 10);
  CHECK(!kf.free.components.empty());
}
