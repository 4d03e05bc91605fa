#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "seasky/associate.h"
#include "seasky/detect.h"
#include "seasky/evaluate.h"
#include "seasky/geometry.h"
#include "seasky/leading_edge.h"
#include "seasky/mapping.h"
#include "seasky/preprocess.h"
#include "seasky/simulate.h"
#include "seasky/sonar_core.h"

namespace seasky {

// Sub-config parsers. Missing keys keep their defaults; each result passes
// its own validator or std::invalid_argument is thrown.
SonarIntrinsics intrinsics_from_json(const nlohmann::json& j,
                                     SonarIntrinsics defaults);
// {rotation_axis: [x, y, z], rotation_deg, translation_m: [x, y, z]}
RigidTransform transform_from_json(const nlohmann::json& j);
// Same schema; translation is applied before the rotation.
SonarExtrinsics extrinsics_from_json(const nlohmann::json& j);
PreprocessConfig preprocess_from_json(const nlohmann::json& j,
                                      PreprocessConfig defaults);
CfarConfig cfar_from_json(const nlohmann::json& j, CfarConfig defaults);
DbscanConfig dbscan_from_json(const nlohmann::json& j);
Scene scene_from_json(const nlohmann::json& j);
NoiseModel noise_from_json(const nlohmann::json& j, std::uint64_t seed);
TrajectoryParams trajectory_params_from_json(const nlohmann::json& j);
LidarPattern lidar_pattern_from_json(const nlohmann::json& j);

enum class FramePolicy { kPingRates, kSynchronized };

struct SimulationConfig {
  Scene scene;
  TrajectoryParams trajectory;
  NoiseModel noise;
  bool noise_enabled = false;
  SonarSimConfig sonar;
  LidarPattern lidar = LidarPattern::default_pattern();
  FramePolicy frame_policy = FramePolicy::kPingRates;
  double ping_rate_horizontal = 15.0;  // Hz
  double ping_rate_vertical = 10.0;    // Hz
};

struct EvaluationConfig {
  MapChannel channel_a = MapChannel::kStereo;
  MapChannel channel_b = MapChannel::kLidar;
  std::optional<std::pair<double, double>> segment_x;
  DistributionConfig distribution;
};

struct PipelineConfig {
  std::uint64_t seed = 0;
  SonarIntrinsics horizontal = SonarIntrinsics::horizontal_default();
  SonarIntrinsics vertical = SonarIntrinsics::vertical_default();
  SonarExtrinsics extrinsics;
  RigidTransform sonar_mount;  // horizontal sonar -> body
  RigidTransform lidar_mount;  // lidar -> body
  PreprocessConfig preprocess_horizontal = PreprocessConfig::horizontal_default();
  PreprocessConfig preprocess_vertical = PreprocessConfig::vertical_default();
  LeadingEdgeConfig leading_edge;
  StereoConfig stereo;
  KeyframeThresholds keyframes;
  double pairing_window = 0.075;  // s

  // Inputs: either simulate or read from disk.
  std::optional<SimulationConfig> simulation;
  std::filesystem::path frames_dir;
  std::filesystem::path trajectory_csv;
  std::filesystem::path lidar_dir;

  std::filesystem::path map_ply;
  std::filesystem::path map_xyz;  // optional
  std::filesystem::path metrics_json;
  std::filesystem::path manifest_json;

  std::optional<EvaluationConfig> evaluation;

  void validate() const;
};

// Relative paths resolve against `base_dir`.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir);

SimulationConfig simulation_from_json(const nlohmann::json& j,
                                      std::uint64_t seed);

EvaluationConfig evaluation_from_json(const nlohmann::json& j);

// Hex SHA-256 of a string.
std::string sha256_hex(const std::string& data);

}  // namespace seasky
