#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "seasky/geometry.h"
#include "seasky/sonar_core.h"

namespace seasky {

struct Pose {
  double timestamp = 0.0;
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  RigidTransform body_to_world() const {
    return RigidTransform::from_quaternion(rotation, translation);
  }
};

// Angle of the relative rotation between two orientations, in [0, pi].
double rotation_angle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b);

// Time-ordered poses.
class Trajectory {
 public:
  Trajectory() = default;
  // Throws std::invalid_argument unless timestamps strictly increase and
  // quaternions are unit within 1e-9.
  explicit Trajectory(std::vector<Pose> poses);

  const std::vector<Pose>& poses() const { return poses_; }
  bool empty() const { return poses_.empty(); }
  std::size_t size() const { return poses_.size(); }
  double start_time() const { return poses_.front().timestamp; }
  double end_time() const { return poses_.back().timestamp; }
  bool covers(double t) const {
    return !poses_.empty() && t >= start_time() && t <= end_time();
  }

  // Pose at t from the two bracketing samples. Throws std::domain_error
  // outside the covered span.
  Pose pose_at(double t) const;

 private:
  std::vector<Pose> poses_;
};

struct KeyframeThresholds {
  double translation = 1.0;  // m
  double rotation = 0.05;    // rad
};

struct Keyframe {
  int id = 0;
  Pose pose;
};

// The first candidate always becomes keyframe 0; later ones only when the
// motion since the last keyframe reaches either threshold.
std::optional<Keyframe> insert_keyframe_if_due(
    const std::vector<Keyframe>& keyframes, const Pose& candidate,
    const KeyframeThresholds& thresholds = {});

std::vector<Keyframe> select_keyframes(const Trajectory& trajectory,
                                       const KeyframeThresholds& thresholds = {});

// Linear translation, shortest-geodesic rotation at the same fraction.
// Throws std::domain_error("extrapolation refused") when t is outside
// [p0.timestamp, p1.timestamp], std::invalid_argument when the bracket is
// empty.
Pose interpolate_pose(double t, const Pose& p0, const Pose& p1);

enum class MapChannel : std::uint8_t { kLidar = 0, kStereo = 1, kEdgeH = 2, kEdgeV = 3 };

const char* to_string(MapChannel channel);
MapChannel channel_from_string(const std::string& name);

struct MapPoint {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  MapChannel channel = MapChannel::kLidar;
  double timestamp = 0.0;
};

struct StampedPoint {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double timestamp = 0.0;
};

struct SeabedSkyMap {
  std::vector<MapPoint> points;
  std::vector<Keyframe> keyframes;

  std::size_t count(MapChannel channel) const;
};

struct AttachStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

// Each point goes sensor -> body through `sensor_to_body`, then body -> world
// through the trajectory pose interpolated at its own timestamp. Points
// stamped outside the trajectory span are rejected and counted.
AttachStats attach_sonar_data(SeabedSkyMap& map,
                              const std::vector<StampedPoint>& points,
                              MapChannel channel,
                              const RigidTransform& sensor_to_body,
                              const Trajectory& trajectory);

void attach_lidar_scan(SeabedSkyMap& map,
                       const std::vector<CartesianPoint>& scan,
                       const Pose& pose,
                       const RigidTransform& sensor_to_body =
                           RigidTransform::identity());

}  // namespace seasky
