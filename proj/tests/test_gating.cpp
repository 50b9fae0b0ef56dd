#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mcg/gating.hpp"

using namespace mcg;

namespace {

Pose random_pose(Rng& rng, double span = 4.0) {
  Pose p;
  p.t = Vec3(rng.uniform(-span, span), rng.uniform(-span, span),
             rng.uniform(-span, span));
  p.roll = rng.uniform(-0.4, 0.4);
  p.pitch = rng.uniform(-0.4, 0.4);
  p.yaw = rng.uniform(-M_PI, M_PI);
  return p;
}

Aabb pyramid_box(const FovPyramid& p) {
  Aabb box{p.apex, p.apex};
  for (const auto& c : p.corners) {
    box.min = box.min.cwiseMin(c);
    box.max = box.max.cwiseMax(c);
  }
  return box;
}

// Monte-Carlo overlap fraction: uniform draws in a's bounding box.
double mc_overlap(const FovPyramid& a, const FovPyramid& b, Rng& rng, int n) {
  const Aabb box = pyramid_box(a);
  const Vec3 span = box.max - box.min;
  long in_a = 0, in_both = 0;
  for (int i = 0; i < n; ++i) {
    const Vec3 p = box.min + Vec3(span.x() * rng.uniform(),
                                  span.y() * rng.uniform(),
                                  span.z() * rng.uniform());
    if (!pyramid_contains(a, p)) continue;
    ++in_a;
    if (pyramid_contains(b, p)) ++in_both;
  }
  REQUIRE(in_a > n / 50);
  return static_cast<double>(in_both) / static_cast<double>(in_a);
}

}  // namespace

TEST_CASE("pyramid geometry: corners, volume and membership") {
  const double h = 1.2, v = 0.8, r = 5.0;
  Pose eye;  // identity
  FovPyramid p = make_fov_pyramid(eye, h, v, r);
  CHECK(p.apex == Vec3::Zero());
  const double y = r * std::tan(0.5 * h), z = r * std::tan(0.5 * v);
  CHECK((p.corners[0] - Vec3(r, y, z)).norm() < 1e-12);
  CHECK((p.corners[2] - Vec3(r, -y, -z)).norm() < 1e-12);

  // rectangular pyramid: V = base * height / 3
  CHECK(pyramid_volume(p) == doctest::Approx((2 * y) * (2 * z) * r / 3.0)
                                 .epsilon(1e-12));

  CHECK(pyramid_contains(p, Vec3(2.0, 0.0, 0.0)));
  CHECK(pyramid_contains(p, p.apex));                    // apex on boundary
  CHECK(pyramid_contains(p, Vec3(r, 0.0, 0.0)));         // base center
  CHECK(!pyramid_contains(p, Vec3(r + 0.01, 0.0, 0.0))); // beyond the base
  CHECK(!pyramid_contains(p, Vec3(-0.01, 0.0, 0.0)));    // behind the apex
  CHECK(!pyramid_contains(p, Vec3(2.0, 2 * y, 0.0)));    // outside a side
  CHECK(pyramid_contains(p, Vec3(2.0, 0.4 * y * 0.99, 0.0)));

  // rigid motion carries the shape along
  Pose moved;
  moved.t = Vec3(3, -2, 1);
  moved.yaw = 1.1;
  moved.pitch = -0.3;
  FovPyramid q = make_fov_pyramid(moved, h, v, r);
  CHECK(pyramid_volume(q) == doctest::Approx(pyramid_volume(p)).epsilon(1e-9));
  CHECK(pyramid_contains(q, moved.apply(Vec3(2.0, 0.0, 0.0))));
  CHECK(!pyramid_contains(q, moved.apply(Vec3(r + 0.01, 0.0, 0.0))));
}

TEST_CASE("overlap fraction is exactly 1 on itself and 0 when disjoint") {
  Rng rng(21);
  for (int i = 0; i < 50; ++i) {
    Pose a = random_pose(rng);
    FovPyramid p = make_fov_pyramid(a, 1.5, 1.0, 5.0);
    CHECK(pyramid_overlap_fraction(p, p) == 1.0);

    Pose far = a;
    far.t += Vec3(100, 0, 0);
    FovPyramid q = make_fov_pyramid(far, 1.5, 1.0, 5.0);
    CHECK(pyramid_overlap_fraction(p, q) == 0.0);
    CHECK(pyramid_overlap_fraction(q, p) == 0.0);
  }

  // back-to-back views share only the apex: zero volume overlap
  Pose fwd, bwd;
  bwd.yaw = M_PI;
  FovPyramid pf = make_fov_pyramid(fwd, 1.5, 1.0, 5.0);
  FovPyramid pb = make_fov_pyramid(bwd, 1.5, 1.0, 5.0);
  CHECK(pyramid_overlap_fraction(pf, pb) == 0.0);
}

TEST_CASE("overlap fraction is symmetric for equal-volume views") {
  Rng rng(22);
  for (int i = 0; i < 30; ++i) {
    Pose a = random_pose(rng, 1.5);
    Pose b = random_pose(rng, 1.5);
    FovPyramid pa = make_fov_pyramid(a, 1.5, 1.0, 5.0);
    FovPyramid pb = make_fov_pyramid(b, 1.5, 1.0, 5.0);
    const double ab = pyramid_overlap_fraction(pa, pb);
    const double ba = pyramid_overlap_fraction(pb, pa);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-6));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("overlap fraction is invariant under a shared rigid motion") {
  Rng rng(23);
  for (int i = 0; i < 20; ++i) {
    Pose a = random_pose(rng, 1.0);
    Pose b = random_pose(rng, 1.0);
    FovPyramid pa = make_fov_pyramid(a, 1.3, 0.9, 4.0);
    FovPyramid pb = make_fov_pyramid(b, 1.3, 0.9, 4.0);
    const double before = pyramid_overlap_fraction(pa, pb);

    Pose t = random_pose(rng, 10.0);
    auto carry = [&](const FovPyramid& p) {
      FovPyramid out;
      out.apex = t.apply(p.apex);
      for (int k = 0; k < 4; ++k) out.corners[k] = t.apply(p.corners[k]);
      return out;
    };
    const double after = pyramid_overlap_fraction(carry(pa), carry(pb));
    CHECK(after == doctest::Approx(before).epsilon(1e-6));
  }
}

TEST_CASE("overlap fraction agrees with Monte Carlo on partial views") {
  Rng rng(24);
  int tested = 0;
  while (tested < 12) {
    Pose a = random_pose(rng, 1.0);
    Pose b = a;
    b.t += Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-1, 1));
    b.yaw += rng.uniform(-0.8, 0.8);
    FovPyramid pa = make_fov_pyramid(a, 1.5, 1.0, 5.0);
    FovPyramid pb = make_fov_pyramid(b, 1.5, 1.0, 5.0);
    const double frac = pyramid_overlap_fraction(pa, pb);
    if (frac < 0.05 || frac > 0.95) continue;  // want genuinely partial cases
    const double mc = mc_overlap(pa, pb, rng, 200000);
    CHECK(frac == doctest::Approx(mc).epsilon(0.03));
    ++tested;
  }
}

TEST_CASE("360 gate: a pose-centered box suppresses nearby revisits") {
  GateConfig cfg;
  cfg.mode = GateConfig::Mode::full_360;
  cfg.half_extent = Vec3(0.5, 0.5, 0.5);
  KeyframeGate gate(cfg);

  Pose p0;
  p0.t = Vec3(1, 1, 1);
  CHECK(gate.should_store(p0));  // empty gate always stores
  gate.add(p0);
  CHECK(gate.size() == 1);

  Pose near = p0;
  near.t += Vec3(0.3, -0.2, 0.1);
  CHECK(!gate.should_store(near));

  Pose away = p0;
  away.t += Vec3(0.7, 0.0, 0.0);  // outside the +-0.5 box on x
  CHECK(gate.should_store(away));
  gate.add(away);
  CHECK(!gate.should_store(near));  // still inside the first box

  Pose diag = p0;
  diag.t += Vec3(0.6, 0.6, 0.0);  // outside both boxes (axis test, not radius)
  CHECK(gate.should_store(diag));

  // yaw does not matter for the 360 gate
  Pose spun = near;
  spun.yaw = 2.0;
  CHECK(!gate.should_store(spun));
}

TEST_CASE("fov gate: stores while the view is novel, drops redundant looks") {
  GateConfig cfg;
  cfg.mode = GateConfig::Mode::limited_fov;
  cfg.overlap_threshold = 0.5;
  cfg.h_fov = 1.5;
  cfg.v_fov = 1.0;
  cfg.range = 5.0;
  KeyframeGate gate(cfg);

  Pose p0;
  p0.t = Vec3(0, 0, 0);
  CHECK(gate.should_store(p0));
  gate.add(p0);

  CHECK(!gate.should_store(p0));  // identical view: overlap is 1

  Pose spun = p0;
  spun.yaw = M_PI / 2;  // quarter turn: barely any shared volume
  CHECK(gate.should_store(spun));
  gate.add(spun);

  Pose nudged = p0;
  nudged.yaw = 0.05;  // nearly the same view as the first
  CHECK(!gate.should_store(nudged));

  Pose shifted = p0;
  shifted.t += Vec3(-4.0, 0, 0);  // looking the same way from well behind
  CHECK(gate.should_store(shifted));
}
