#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "seasky/sonar_core.h"

namespace seasky {

class RigidTransform {
 public:
  RigidTransform() = default;
  // Throws std::invalid_argument unless rotation is orthonormal with det +1.
  RigidTransform(const Eigen::Matrix3d& rotation,
                 const Eigen::Vector3d& translation);

  static RigidTransform identity() { return {}; }
  static RigidTransform from_axis_angle(const Eigen::Vector3d& axis,
                                        double angle_rad,
                                        const Eigen::Vector3d& translation);
  static RigidTransform from_quaternion(const Eigen::Quaterniond& q,
                                        const Eigen::Vector3d& translation);

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const {
    return rotation_ * p + translation_;
  }
  RigidTransform operator*(const RigidTransform& rhs) const;
  RigidTransform inverse() const;

 private:
  Eigen::Matrix3d rotation_ = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation_ = Eigen::Vector3d::Zero();
};

inline Eigen::Vector3d to_eigen(const CartesianPoint& p) {
  return {p.x, p.y, p.z};
}
inline CartesianPoint from_eigen(const Eigen::Vector3d& v,
                                 double intensity = 0.0) {
  return {v.x(), v.y(), v.z(), intensity};
}

// p' = R p + t; intensity carried through.
CartesianPoint apply(const RigidTransform& t, const CartesianPoint& p);

// Maps vertical-sonar coordinates into the horizontal sonar frame. The
// rotation is applied after the translation: p_h = R (p_v + t).
struct SonarExtrinsics {
  RigidTransform vertical_to_horizontal =
      RigidTransform::from_axis_angle(Eigen::Vector3d::UnitX(),
                                      deg2rad(-90.0), Eigen::Vector3d::Zero());

  // -90 deg about x with the given translation.
  static SonarExtrinsics with_translation(const Eigen::Vector3d& t);
};

std::vector<CartesianPoint> vertical_points_to_horizontal_frame(
    const std::vector<CartesianPoint>& scan, const SonarExtrinsics& ext);

// Angular field of a sonar placed in some reference frame. Membership is a
// pair of bearing half-spaces, the elevation bound |elev| <= aperture / 2 and
// the range bounds.
struct SonarFrustum {
  RigidTransform sensor_to_reference;
  SonarIntrinsics intrinsics;

  bool contains(const CartesianPoint& p_reference) const;
};

struct OverlapRegion {
  SonarFrustum horizontal;
  SonarFrustum vertical;

  OverlapRegion(const SonarExtrinsics& ext, const SonarIntrinsics& h,
                const SonarIntrinsics& v);

  bool contains(const CartesianPoint& p_horizontal) const {
    return horizontal.contains(p_horizontal) && vertical.contains(p_horizontal);
  }
};

// Both inputs in the horizontal frame; keeps the points inside both frusta.
std::pair<std::vector<CartesianPoint>, std::vector<CartesianPoint>>
trim_to_overlap(const std::vector<CartesianPoint>& h_points,
                const std::vector<CartesianPoint>& v_points,
                const SonarExtrinsics& ext, const SonarIntrinsics& h_intrinsics,
                const SonarIntrinsics& v_intrinsics);

}  // namespace seasky
