#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "seasky/geometry.h"
#include "seasky/mapping.h"
#include "seasky/sonar_core.h"

namespace seasky {

// Parallelogram origin + a*edge_u + b*edge_v, a, b in [0, 1].
struct PlanePatch {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  Eigen::Vector3d edge_u = Eigen::Vector3d::UnitX();
  Eigen::Vector3d edge_v = Eigen::Vector3d::UnitY();
  double reflectivity = 1.0;
};

struct AxisAlignedBox {
  Eigen::Vector3d min_corner = Eigen::Vector3d::Zero();
  Eigen::Vector3d max_corner = Eigen::Vector3d::Ones();
  double reflectivity = 1.0;
};

struct Scene {
  std::vector<PlanePatch> planes;
  std::vector<AxisAlignedBox> boxes;
  double water_level = 0.0;

  // Throws std::invalid_argument for degenerate extents or reflectivity
  // outside (0, 1].
  void validate() const;
  std::size_t surface_count() const { return planes.size() + boxes.size(); }
};

struct RayHit {
  double distance = 0.0;
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();  // unit, plane of the hit
  int surface = -1;  // planes first, then boxes
  double reflectivity = 0.0;
};

// Nearest intersection with distance in (0, max_distance].
std::optional<RayHit> cast_ray(const Scene& scene,
                               const Eigen::Vector3d& origin,
                               const Eigen::Vector3d& direction,
                               double max_distance);

struct SonarSimConfig {
  int elevation_rays = 64;
  // Intensity added per elevation ray per unit reflectivity.
  double gain = 16.0;
};

struct GroundTruthHit {
  PolarIndex cell;
  Eigen::Vector3d world = Eigen::Vector3d::Zero();
  Eigen::Vector3d sensor = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  int surface = -1;
};

struct SimulatedSonarFrame {
  PolarSonarImage image;
  std::vector<GroundTruthHit> hits;
};

// Every beam fires a fan of elevation rays across the vertical aperture; the
// first hit below the water surface lands in its range bin, which collects
// gain * reflectivity per ray.
SimulatedSonarFrame raycast_sonar(const Scene& scene,
                                  const RigidTransform& sensor_to_world,
                                  const SonarIntrinsics& intrinsics,
                                  double timestamp = 0.0,
                                  const SonarSimConfig& cfg = {});

struct LidarPattern {
  std::vector<double> elevations;  // rad
  int azimuth_steps = 512;
  double max_range = 40.0;
  double min_range = 0.5;

  // 16 channels over +-15 deg.
  static LidarPattern default_pattern();
};

// First hits above the water surface, in the sensor frame.
std::vector<CartesianPoint> raycast_lidar(const Scene& scene,
                                          const RigidTransform& sensor_to_world,
                                          const LidarPattern& pattern);

struct NoiseModel {
  double speckle_density = 0.0;
  double speckle_min = 100.0;
  double speckle_max = 255.0;
  double row_bias_amplitude = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct NoisyImage {
  PolarSonarImage image;
  std::vector<std::size_t> speckle_pixels;  // ascending buffer indices
};

// Exactly round(density * pixels) distinct speckle pixels, plus a per-row
// offset uniform in [0, row_bias_amplitude). Values clamp at the bit-depth
// maximum.
NoisyImage apply_noise(const PolarSonarImage& img, const NoiseModel& model);

enum class TrajectoryKind { kLine, kArc, kLawnmower };

TrajectoryKind trajectory_kind_from_string(const std::string& name);

struct TrajectoryParams {
  TrajectoryKind kind = TrajectoryKind::kLine;
  Eigen::Vector3d start = Eigen::Vector3d::Zero();
  double heading = 0.0;  // rad, yaw of the initial direction
  double speed = 1.0;    // m/s
  double rate = 10.0;    // Hz
  double start_time = 0.0;
  double length = 10.0;  // line length, lawnmower lane length
  double radius = 5.0;   // arc radius
  double sweep = kPi / 2.0;  // arc angle, positive turns left
  int lanes = 3;
  double lane_spacing = 4.0;

  void validate() const;
};

// Constant-speed poses at a fixed rate, yaw along the path tangent.
Trajectory generate_trajectory(const TrajectoryParams& params);

}  // namespace seasky
