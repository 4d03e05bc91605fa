#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "seasky/config.h"
#include "seasky/evaluate.h"
#include "seasky/mapping.h"
#include "seasky/simulate.h"
#include "seasky/sonar_core.h"

namespace seasky {

inline constexpr const char* kToolVersion = "0.1.0";

struct LidarScan {
  double timestamp = 0.0;
  std::vector<CartesianPoint> points;  // sensor frame
};

// Frames sorted by timestamp.
struct Dataset {
  std::vector<PolarSonarImage> horizontal;
  std::vector<PolarSonarImage> vertical;
  Trajectory trajectory;
  std::vector<LidarScan> lidar;
};

struct SimulatedDataset {
  Dataset data;
  std::vector<std::vector<GroundTruthHit>> horizontal_truth;
  std::vector<std::vector<GroundTruthHit>> vertical_truth;
};

// Deterministic for a given config and seed. cfg.simulation must be set.
SimulatedDataset simulate_dataset(const PipelineConfig& cfg);

// Frame timestamps under a policy, trajectory span inclusive.
std::vector<double> ping_times(const Trajectory& trajectory, double rate_hz);

// (horizontal index, vertical index). Each vertical frame is paired with the
// nearest horizontal frame within `window`; ties go to the earlier frame.
std::vector<std::pair<std::size_t, std::size_t>> pair_frames(
    const std::vector<double>& horizontal_times,
    const std::vector<double>& vertical_times, double window);

struct MapCounts {
  std::size_t frames_horizontal = 0;
  std::size_t frames_vertical = 0;
  std::size_t pairs = 0;
  std::size_t skipped_frames = 0;
  std::size_t rejected_points = 0;
  std::size_t lidar_scans = 0;
};

struct MapRun {
  SeabedSkyMap map;
  MapCounts counts;
  std::vector<std::string> warnings;
};

// Preprocessing, leading edges, stereo fusion and map assembly. Frame pairs
// run on `threads` workers; the map is ordered by frame time.
MapRun assemble_map(const Dataset& data, const PipelineConfig& cfg,
                    int threads = 0);

// Map points of one channel, x restricted to `segment` when given.
std::vector<Eigen::Vector3d> channel_points(
    const std::vector<MapPoint>& points, MapChannel channel,
    std::optional<std::pair<double, double>> segment = std::nullopt);

nlohmann::json comparison_to_json(const DistributionComparison& cmp);
nlohmann::json alignment_to_json(const AlignmentResult& result);
std::string kde_csv(const DistributionComparison& cmp);

// Reads frames_dir (h_*.json / v_*.json stems), the trajectory and optional
// lidar_dir. Malformed frames are skipped with a warning; throws DataError
// for a missing trajectory or when no frame survives.
Dataset load_dataset(const PipelineConfig& cfg,
                     std::vector<std::string>& warnings);

// Writes frames/, lidar/, ground_truth/ and trajectory.csv under out_dir.
void write_dataset(const SimulatedDataset& sim,
                   const std::filesystem::path& out_dir);

struct MapOutputs {
  std::string ply;
  std::string xyz;
  std::string metrics;
  std::string manifest;
};

// Everything run_map writes, rendered in memory.
MapOutputs render_map_outputs(const MapRun& run, const PipelineConfig& cfg,
                              const std::string& config_text);

}  // namespace seasky
