#include "seasky/mapping.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seasky {

double rotation_angle(const Eigen::Quaterniond& a,
                      const Eigen::Quaterniond& b) {
  const Eigen::Quaterniond rel = a.conjugate() * b;
  return 2.0 * std::atan2(rel.vec().norm(), std::abs(rel.w()));
}

Trajectory::Trajectory(std::vector<Pose> poses) : poses_(std::move(poses)) {
  for (std::size_t i = 0; i < poses_.size(); ++i) {
    if (std::abs(poses_[i].rotation.norm() - 1.0) > 1e-9)
      throw std::invalid_argument("trajectory quaternion is not unit");
    if (i > 0 && !(poses_[i].timestamp > poses_[i - 1].timestamp))
      throw std::invalid_argument("trajectory timestamps must increase");
  }
}

Pose Trajectory::pose_at(double t) const {
  if (!covers(t)) throw std::domain_error("extrapolation refused");
  auto it = std::lower_bound(
      poses_.begin(), poses_.end(), t,
      [](const Pose& p, double value) { return p.timestamp < value; });
  if (it->timestamp == t) return *it;
  return interpolate_pose(t, *(it - 1), *it);
}

std::optional<Keyframe> insert_keyframe_if_due(
    const std::vector<Keyframe>& keyframes, const Pose& candidate,
    const KeyframeThresholds& thresholds) {
  if (keyframes.empty()) return Keyframe{0, candidate};
  const Keyframe& last = keyframes.back();
  const double moved = (candidate.translation - last.pose.translation).norm();
  const double turned = rotation_angle(last.pose.rotation, candidate.rotation);
  if (moved >= thresholds.translation || turned >= thresholds.rotation) {
    return Keyframe{last.id + 1, candidate};
  }
  return std::nullopt;
}

std::vector<Keyframe> select_keyframes(const Trajectory& trajectory,
                                       const KeyframeThresholds& thresholds) {
  std::vector<Keyframe> keyframes;
  for (const auto& pose : trajectory.poses()) {
    if (auto kf = insert_keyframe_if_due(keyframes, pose, thresholds)) {
      keyframes.push_back(*kf);
    }
  }
  return keyframes;
}

Pose interpolate_pose(double t, const Pose& p0, const Pose& p1) {
  if (!(p0.timestamp < p1.timestamp))
    throw std::invalid_argument("pose bracket must have t0 < t1");
  if (t < p0.timestamp || t > p1.timestamp)
    throw std::domain_error("extrapolation refused");
  if (t == p0.timestamp) return p0;
  if (t == p1.timestamp) return p1;

  const double lambda = (t - p0.timestamp) / (p1.timestamp - p0.timestamp);
  Pose out;
  out.timestamp = t;
  out.translation = (1.0 - lambda) * p0.translation + lambda * p1.translation;
  // Eigen's slerp flips the target sign when needed, i.e. follows the short arc.
  out.rotation = p0.rotation.slerp(lambda, p1.rotation).normalized();
  return out;
}

const char* to_string(MapChannel channel) {
  switch (channel) {
    case MapChannel::kLidar: return "lidar";
    case MapChannel::kStereo: return "stereo";
    case MapChannel::kEdgeH: return "edge_h";
    case MapChannel::kEdgeV: return "edge_v";
  }
  return "unknown";
}

MapChannel channel_from_string(const std::string& name) {
  if (name == "lidar") return MapChannel::kLidar;
  if (name == "stereo") return MapChannel::kStereo;
  if (name == "edge_h") return MapChannel::kEdgeH;
  if (name == "edge_v") return MapChannel::kEdgeV;
  throw std::invalid_argument("unknown map channel '" + name + "'");
}

std::size_t SeabedSkyMap::count(MapChannel channel) const {
  return static_cast<std::size_t>(
      std::count_if(points.begin(), points.end(),
                    [channel](const MapPoint& p) { return p.channel == channel; }));
}

AttachStats attach_sonar_data(SeabedSkyMap& map,
                              const std::vector<StampedPoint>& points,
                              MapChannel channel,
                              const RigidTransform& sensor_to_body,
                              const Trajectory& trajectory) {
  AttachStats stats;
  for (const auto& sp : points) {
    if (!trajectory.covers(sp.timestamp)) {
      ++stats.rejected;
      continue;
    }
    const RigidTransform world_from_body =
        trajectory.pose_at(sp.timestamp).body_to_world();
    map.points.push_back(
        {world_from_body * (sensor_to_body * sp.position), channel,
         sp.timestamp});
    ++stats.accepted;
  }
  return stats;
}

void attach_lidar_scan(SeabedSkyMap& map,
                       const std::vector<CartesianPoint>& scan,
                       const Pose& pose,
                       const RigidTransform& sensor_to_body) {
  const RigidTransform world_from_sensor = pose.body_to_world() * sensor_to_body;
  for (const auto& p : scan) {
    map.points.push_back(
        {world_from_sensor * to_eigen(p), MapChannel::kLidar, pose.timestamp});
  }
}

}  // namespace seasky
