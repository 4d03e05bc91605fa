#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "seasky/geometry.h"

namespace seasky {
namespace {

RigidTransform random_transform(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> a(-kPi, kPi);
  return RigidTransform::from_axis_angle({n(rng), n(rng), n(rng)}, a(rng),
                                         {n(rng), n(rng), n(rng)});
}

TEST(Apply, HandCases) {
  const CartesianPoint p{1.0, 2.0, 0.0, 7.0};
  const auto same = apply(RigidTransform::identity(), p);
  EXPECT_EQ(same.x, 1.0);
  EXPECT_EQ(same.y, 2.0);
  EXPECT_EQ(same.intensity, 7.0);

  const SonarExtrinsics ext;
  const auto q = apply(ext.vertical_to_horizontal, p);
  EXPECT_NEAR(q.x, 1.0, 1e-15);
  EXPECT_NEAR(q.y, 0.0, 1e-15);
  EXPECT_NEAR(q.z, -2.0, 1e-15);

  const RigidTransform shift(Eigen::Matrix3d::Identity(), {0.1, 0.0, -0.2});
  const auto s = apply(shift, {0, 0, 0, 0});
  EXPECT_EQ(s.x, 0.1);
  EXPECT_EQ(s.z, -0.2);
}

TEST(RigidTransform, RejectsNonRotation) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 0) = -1.0;
  EXPECT_THROW(RigidTransform(m, Eigen::Vector3d::Zero()), std::invalid_argument);
  m = Eigen::Matrix3d::Identity() * 1.1;
  EXPECT_THROW(RigidTransform(m, Eigen::Vector3d::Zero()), std::invalid_argument);
}

TEST(RigidTransform, DistancePreservationAndInverse) {
  std::mt19937_64 rng(20);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    const auto t = random_transform(rng);
    const Eigen::Vector3d p(n(rng), n(rng), n(rng)), q(n(rng), n(rng), n(rng));
    EXPECT_NEAR(((t * p) - (t * q)).norm(), (p - q).norm(), 1e-9);
    EXPECT_NEAR((t.inverse() * (t * p) - p).norm(), 0.0, 1e-9);
  }
}

TEST(SonarExtrinsics, TranslationAppliedBeforeRotation) {
  const auto ext = SonarExtrinsics::with_translation({0.05, 0.0, -0.10});
  const Eigen::Vector3d p = ext.vertical_to_horizontal * Eigen::Vector3d(1, 2, 0);
  // Rx(-90) (p + t) = (x, z, -y) of (1.05, 2, -0.1).
  EXPECT_NEAR(p.x(), 1.05, 1e-15);
  EXPECT_NEAR(p.y(), -0.10, 1e-15);
  EXPECT_NEAR(p.z(), -2.0, 1e-15);
}

TEST(SonarExtrinsics, BoresightIsFixedWithoutTranslation) {
  const SonarExtrinsics ext;
  const Eigen::Vector3d p = ext.vertical_to_horizontal * Eigen::Vector3d(4, 0, 0);
  EXPECT_EQ(p, Eigen::Vector3d(4, 0, 0));
}

TEST(VerticalPointsToHorizontalFrame, LiftsApply) {
  const auto ext = SonarExtrinsics::with_translation({0.1, 0.2, 0.3});
  EXPECT_TRUE(vertical_points_to_horizontal_frame({}, ext).empty());
  const CartesianPoint p{1, 2, 3, 4};
  const auto out = vertical_points_to_horizontal_frame({p}, ext);
  ASSERT_EQ(out.size(), 1u);
  const auto e = apply(ext.vertical_to_horizontal, p);
  EXPECT_EQ(out[0].x, e.x);
  EXPECT_EQ(out[0].y, e.y);
  EXPECT_EQ(out[0].z, e.z);
}

// Explicit half-space description of a sonar wedge in its own frame.
bool wedge_oracle(const Eigen::Vector3d& p, const SonarIntrinsics& in) {
  const Eigen::Vector3d n_min(std::sin(in.bearing_min), -std::cos(in.bearing_min), 0);
  const Eigen::Vector3d n_max(-std::sin(in.bearing_max), std::cos(in.bearing_max), 0);
  const double planar = std::hypot(p.x(), p.y());
  return n_min.dot(p) <= 0.0 && n_max.dot(p) <= 0.0 &&
         std::abs(p.z()) <= std::tan(in.vertical_aperture / 2) * planar &&
         p.norm() >= in.min_range && p.norm() <= in.max_range;
}

TEST(TrimToOverlap, BoresightKeptWideBearingDropped) {
  const SonarExtrinsics ext;
  const auto h = SonarIntrinsics::horizontal_default();
  const auto v = SonarIntrinsics::vertical_default();
  const auto [ht, vt] = trim_to_overlap({project_planar(5.0, 0.0),
                                         project_planar(5.0, deg2rad(60.0))},
                                        {{5.0, 0.0, 0.0, 0.0}}, ext, h, v);
  ASSERT_EQ(ht.size(), 1u);
  EXPECT_EQ(ht[0].x, 5.0);
  EXPECT_EQ(vt.size(), 1u);
  const auto [he, ve] = trim_to_overlap({}, {}, ext, h, v);
  EXPECT_TRUE(he.empty());
  EXPECT_TRUE(ve.empty());
}

TEST(TrimToOverlap, MatchesHalfSpaceOracleSubsetAndIdempotent) {
  const auto ext = SonarExtrinsics::with_translation({0.05, 0.0, -0.10});
  const auto h = SonarIntrinsics::horizontal_default();
  const auto v = SonarIntrinsics::vertical_default();
  const OverlapRegion region(ext, h, v);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> x(-1.0, 11.0), yz(-3.0, 3.0);
  std::vector<CartesianPoint> pts;
  for (int i = 0; i < 5000; ++i) pts.push_back({x(rng), yz(rng), yz(rng), 0});
  const RigidTransform h_to_v = ext.vertical_to_horizontal.inverse();
  for (const auto& p : pts) {
    const Eigen::Vector3d e = to_eigen(p);
    EXPECT_EQ(region.contains(p), wedge_oracle(e, h) && wedge_oracle(h_to_v * e, v));
  }
  const auto [ht, vt] = trim_to_overlap(pts, pts, ext, h, v);
  EXPECT_LE(ht.size(), pts.size());
  EXPECT_EQ(ht.size(), vt.size());
  const auto [ht2, vt2] = trim_to_overlap(ht, vt, ext, h, v);
  EXPECT_EQ(ht2.size(), ht.size());
  EXPECT_EQ(vt2.size(), vt.size());
}

}  // namespace
}  // namespace seasky
