#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace seasky::testing {

// Canal wall scene on a short straight run; fast enough for unit tests.
inline nlohmann::json short_canal_config(double length_m = 3.0) {
  auto j = nlohmann::json::parse(R"({
    "seed": 3,
    "extrinsics": {"translation_m": [0.05, 0.0, -0.10]},
    "mounts": {
      "sonar_horizontal": {"rotation_axis": [0, 0, 1], "rotation_deg": 90, "translation_m": [0, 0, -1.0]},
      "lidar": {"translation_m": [0, 0, 1.0]}
    },
    "simulation": {
      "scene": {"water_level": 0.0, "surfaces": [
        {"type": "plane", "origin": [-10, 3, -4], "edges": [[40, 0, 0], [0, 0, 6]]}]},
      "trajectory": {"kind": "line", "speed_mps": 1.0, "rate_hz": 10},
      "noise": {"speckle_density": 0.002, "row_bias_amplitude": 4}
    },
    "outputs": {"map_ply": "map.ply", "metrics_json": "metrics.json",
                "manifest_json": "manifest.json"},
    "evaluate": {"channel_a": "stereo", "channel_b": "lidar"}
  })");
  j["simulation"]["trajectory"]["length_m"] = length_m;
  return j;
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("seasky_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace seasky::testing
