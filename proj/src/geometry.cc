#include "seasky/geometry.h"

#include <cmath>
#include <stdexcept>

namespace seasky {

RigidTransform::RigidTransform(const Eigen::Matrix3d& rotation,
                               const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
  const double ortho =
      (rotation_.transpose() * rotation_ - Eigen::Matrix3d::Identity())
          .cwiseAbs()
          .maxCoeff();
  if (!(ortho < 1e-9) || !(rotation_.determinant() > 0.0)) {
    throw std::invalid_argument("rotation must be orthonormal with det +1");
  }
}

RigidTransform RigidTransform::from_axis_angle(
    const Eigen::Vector3d& axis, double angle_rad,
    const Eigen::Vector3d& translation) {
  if (!(axis.norm() > 0.0))
    throw std::invalid_argument("rotation axis must be non-zero");
  Eigen::Matrix3d r = Eigen::AngleAxisd(angle_rad, axis.normalized())
                          .toRotationMatrix();
  // Snap exact quarter turns so axis-aligned mounts stay exact.
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double rounded = std::round(r(i, j));
      if (std::abs(r(i, j) - rounded) < 1e-15) r(i, j) = rounded;
    }
  }
  return {r, translation};
}

RigidTransform RigidTransform::from_quaternion(
    const Eigen::Quaterniond& q, const Eigen::Vector3d& translation) {
  return {q.normalized().toRotationMatrix(), translation};
}

RigidTransform RigidTransform::operator*(const RigidTransform& rhs) const {
  RigidTransform out;
  out.rotation_ = rotation_ * rhs.rotation_;
  out.translation_ = rotation_ * rhs.translation_ + translation_;
  return out;
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform out;
  out.rotation_ = rotation_.transpose();
  out.translation_ = -(out.rotation_ * translation_);
  return out;
}

CartesianPoint apply(const RigidTransform& t, const CartesianPoint& p) {
  return from_eigen(t * to_eigen(p), p.intensity);
}

SonarExtrinsics SonarExtrinsics::with_translation(const Eigen::Vector3d& t) {
  SonarExtrinsics ext;
  const Eigen::Matrix3d r = ext.vertical_to_horizontal.rotation();
  ext.vertical_to_horizontal = RigidTransform(r, r * t);
  return ext;
}

std::vector<CartesianPoint> vertical_points_to_horizontal_frame(
    const std::vector<CartesianPoint>& scan, const SonarExtrinsics& ext) {
  std::vector<CartesianPoint> out;
  out.reserve(scan.size());
  for (const auto& p : scan) out.push_back(apply(ext.vertical_to_horizontal, p));
  return out;
}

bool SonarFrustum::contains(const CartesianPoint& p_reference) const {
  const Eigen::Vector3d q =
      sensor_to_reference.inverse() * to_eigen(p_reference);
  // Bearing wedge as two half-spaces through the sensor's z axis.
  const double smin = std::sin(intrinsics.bearing_min);
  const double cmin = std::cos(intrinsics.bearing_min);
  const double smax = std::sin(intrinsics.bearing_max);
  const double cmax = std::cos(intrinsics.bearing_max);
  if (cmin * q.y() - smin * q.x() < 0.0) return false;  // left of bearing_min
  if (smax * q.x() - cmax * q.y() < 0.0) return false;  // right of bearing_max
  const double planar = std::hypot(q.x(), q.y());
  if (planar <= 0.0) return false;
  if (std::abs(q.z()) > std::tan(0.5 * intrinsics.vertical_aperture) * planar)
    return false;
  const double range = q.norm();
  return range >= intrinsics.min_range && range <= intrinsics.max_range;
}

OverlapRegion::OverlapRegion(const SonarExtrinsics& ext,
                             const SonarIntrinsics& h,
                             const SonarIntrinsics& v)
    : horizontal{RigidTransform::identity(), h},
      vertical{ext.vertical_to_horizontal, v} {}

std::pair<std::vector<CartesianPoint>, std::vector<CartesianPoint>>
trim_to_overlap(const std::vector<CartesianPoint>& h_points,
                const std::vector<CartesianPoint>& v_points,
                const SonarExtrinsics& ext, const SonarIntrinsics& h_intrinsics,
                const SonarIntrinsics& v_intrinsics) {
  const OverlapRegion region(ext, h_intrinsics, v_intrinsics);
  std::pair<std::vector<CartesianPoint>, std::vector<CartesianPoint>> out;
  for (const auto& p : h_points) {
    if (region.contains(p)) out.first.push_back(p);
  }
  for (const auto& p : v_points) {
    if (region.contains(p)) out.second.push_back(p);
  }
  return out;
}

}  // namespace seasky
