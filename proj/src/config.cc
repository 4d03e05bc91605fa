#include "seasky/config.h"

#include <array>
#include <cstdio>
#include <set>
#include <stdexcept>

#include <openssl/evp.h>

namespace seasky {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Eigen::Vector3d vec3(const json& j) {
  if (!j.is_array() || j.size() != 3)
    throw std::invalid_argument("expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void read_deg(const json& j, const char* key, double& out_rad) {
  if (j.contains(key)) out_rad = deg2rad(j.at(key).get<double>());
}

KernelSize kernel(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw std::invalid_argument("kernel must be [rows, cols]");
  return {j[0].get<int>(), j[1].get<int>()};
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

SonarIntrinsics intrinsics_from_json(const json& j, SonarIntrinsics in) {
  read(j, "num_beams", in.num_beams);
  read(j, "num_range_bins", in.num_range_bins);
  read(j, "max_range_m", in.max_range);
  read(j, "blanking_m", in.min_range);
  read_deg(j, "bearing_min_deg", in.bearing_min);
  read_deg(j, "bearing_max_deg", in.bearing_max);
  read_deg(j, "vertical_aperture_deg", in.vertical_aperture);
  read(j, "bit_depth", in.bit_depth);
  in.validate();
  return in;
}

RigidTransform transform_from_json(const json& j) {
  const Eigen::Vector3d axis =
      j.contains("rotation_axis") ? vec3(j.at("rotation_axis"))
                                  : Eigen::Vector3d::UnitZ();
  const double angle = deg2rad(j.value("rotation_deg", 0.0));
  const Eigen::Vector3d t = j.contains("translation_m")
                                ? vec3(j.at("translation_m"))
                                : Eigen::Vector3d::Zero();
  return RigidTransform::from_axis_angle(axis, angle, t);
}

SonarExtrinsics extrinsics_from_json(const json& j) {
  const Eigen::Vector3d axis =
      j.contains("rotation_axis") ? vec3(j.at("rotation_axis"))
                                  : Eigen::Vector3d::UnitX();
  const double angle = deg2rad(j.value("rotation_deg", -90.0));
  const Eigen::Vector3d t = j.contains("translation_m")
                                ? vec3(j.at("translation_m"))
                                : Eigen::Vector3d::Zero();
  const RigidTransform rot =
      RigidTransform::from_axis_angle(axis, angle, Eigen::Vector3d::Zero());
  SonarExtrinsics ext;
  ext.vertical_to_horizontal = RigidTransform(rot.rotation(), rot.rotation() * t);
  return ext;
}

PreprocessConfig preprocess_from_json(const json& j, PreprocessConfig cfg) {
  read(j, "row_quantile", cfg.row_quantile);
  if (j.contains("center_mask_bearings_deg")) {
    const auto& iv = j.at("center_mask_bearings_deg");
    cfg.center_mask_min = deg2rad(iv.at(0).get<double>());
    cfg.center_mask_max = deg2rad(iv.at(1).get<double>());
  }
  read(j, "center_mask_fraction", cfg.center_mask_fraction);
  if (j.contains("open_kernel")) cfg.open_kernel = kernel(j.at("open_kernel"));
  if (j.contains("median_kernel"))
    cfg.median_kernel = kernel(j.at("median_kernel"));
  cfg.validate();
  return cfg;
}

CfarConfig cfar_from_json(const json& j, CfarConfig cfg) {
  read(j, "reference_cells", cfg.reference_cells);
  read(j, "guard_cells", cfg.guard_cells);
  read(j, "pfa", cfg.pfa);
  read(j, "min_intensity", cfg.min_intensity);
  cfg.validate();
  return cfg;
}

DbscanConfig dbscan_from_json(const json& j) {
  DbscanConfig cfg;
  read(j, "epsilon", cfg.epsilon);
  read(j, "min_samples", cfg.min_samples);
  cfg.validate();
  return cfg;
}

Scene scene_from_json(const json& j) {
  Scene scene;
  read(j, "water_level", scene.water_level);
  for (const auto& s : j.value("surfaces", json::array())) {
    const std::string type = s.at("type").get<std::string>();
    const double refl = s.value("reflectivity", 1.0);
    if (type == "plane") {
      const auto& edges = s.at("edges");
      if (!edges.is_array() || edges.size() != 2)
        throw std::invalid_argument("plane needs two edges");
      scene.planes.push_back(
          {vec3(s.at("origin")), vec3(edges[0]), vec3(edges[1]), refl});
    } else if (type == "box") {
      const Eigen::Vector3d origin = vec3(s.at("origin"));
      scene.boxes.push_back({origin, origin + vec3(s.at("extent")), refl});
    } else {
      throw std::invalid_argument("unknown surface type '" + type + "'");
    }
  }
  scene.validate();
  return scene;
}

NoiseModel noise_from_json(const json& j, std::uint64_t seed) {
  NoiseModel m;
  read(j, "speckle_density", m.speckle_density);
  read(j, "speckle_min", m.speckle_min);
  read(j, "speckle_max", m.speckle_max);
  read(j, "row_bias_amplitude", m.row_bias_amplitude);
  m.seed = seed;
  m.validate();
  return m;
}

TrajectoryParams trajectory_params_from_json(const json& j) {
  TrajectoryParams p;
  if (j.contains("kind"))
    p.kind = trajectory_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("start")) p.start = vec3(j.at("start"));
  read_deg(j, "heading_deg", p.heading);
  read(j, "speed_mps", p.speed);
  read(j, "rate_hz", p.rate);
  read(j, "start_time_s", p.start_time);
  read(j, "length_m", p.length);
  read(j, "radius_m", p.radius);
  read_deg(j, "sweep_deg", p.sweep);
  read(j, "lanes", p.lanes);
  read(j, "lane_spacing_m", p.lane_spacing);
  p.validate();
  return p;
}

LidarPattern lidar_pattern_from_json(const json& j) {
  LidarPattern p = LidarPattern::default_pattern();
  if (j.contains("elevations_deg")) {
    p.elevations.clear();
    for (const auto& e : j.at("elevations_deg"))
      p.elevations.push_back(deg2rad(e.get<double>()));
  }
  read(j, "azimuth_steps", p.azimuth_steps);
  read(j, "max_range_m", p.max_range);
  read(j, "min_range_m", p.min_range);
  if (p.azimuth_steps < 1 || !(p.max_range > p.min_range))
    throw std::invalid_argument("invalid lidar pattern");
  return p;
}

SimulationConfig simulation_from_json(const json& j, std::uint64_t seed) {
  SimulationConfig sim;
  sim.scene = scene_from_json(j.value("scene", json::object()));
  sim.trajectory =
      trajectory_params_from_json(j.value("trajectory", json::object()));
  if (j.contains("noise")) {
    sim.noise = noise_from_json(j.at("noise"), seed);
    sim.noise_enabled = true;
  }
  if (j.contains("sonar")) {
    read(j.at("sonar"), "elevation_rays", sim.sonar.elevation_rays);
    read(j.at("sonar"), "gain", sim.sonar.gain);
  }
  if (j.contains("lidar")) sim.lidar = lidar_pattern_from_json(j.at("lidar"));
  const std::string policy = j.value("frame_policy", std::string("ping_rates"));
  if (policy == "ping_rates") {
    sim.frame_policy = FramePolicy::kPingRates;
  } else if (policy == "synchronized") {
    sim.frame_policy = FramePolicy::kSynchronized;
  } else {
    throw std::invalid_argument("unknown frame_policy '" + policy + "'");
  }
  if (j.contains("ping_rate_hz")) {
    read(j.at("ping_rate_hz"), "horizontal", sim.ping_rate_horizontal);
    read(j.at("ping_rate_hz"), "vertical", sim.ping_rate_vertical);
  }
  if (!(sim.ping_rate_horizontal > 0.0 && sim.ping_rate_vertical > 0.0))
    throw std::invalid_argument("ping rates must be > 0");
  return sim;
}

EvaluationConfig evaluation_from_json(const json& j) {
  EvaluationConfig eval;
  if (j.contains("channel_a"))
    eval.channel_a = channel_from_string(j.at("channel_a").get<std::string>());
  if (j.contains("channel_b"))
    eval.channel_b = channel_from_string(j.at("channel_b").get<std::string>());
  if (j.contains("segment_x")) {
    const auto& s = j.at("segment_x");
    eval.segment_x = std::pair(s.at(0).get<double>(), s.at(1).get<double>());
  }
  auto& d = eval.distribution;
  read(j, "trim_fraction", d.trim_fraction);
  read(j, "kde_bins", d.kde_bins);
  if (j.contains("bandwidth") && !j.at("bandwidth").is_null())
    d.bandwidth = j.at("bandwidth").get<double>();
  const std::string mode = j.value("cosine_mode", std::string("nearest"));
  if (mode == "nearest") {
    d.cosine_mode = CorrespondenceMode::kNearestNeighbor;
  } else if (mode == "ordered") {
    d.cosine_mode = CorrespondenceMode::kOrdered;
  } else {
    throw std::invalid_argument("unknown cosine_mode '" + mode + "'");
  }
  return eval;
}

void PipelineConfig::validate() const {
  horizontal.validate();
  vertical.validate();
  preprocess_horizontal.validate();
  preprocess_vertical.validate();
  stereo.cfar_horizontal.validate();
  stereo.cfar_vertical.validate();
  stereo.dbscan.validate();
  if (!(pairing_window >= 0.0))
    throw std::invalid_argument("pairing window must be >= 0");
  if (!(keyframes.translation > 0.0 && keyframes.rotation > 0.0))
    throw std::invalid_argument("keyframe thresholds must be > 0");
  if (!simulation && (frames_dir.empty() || trajectory_csv.empty()))
    throw std::invalid_argument(
        "inputs need frames_dir and trajectory_csv unless simulating");
  std::set<fs::path> outputs;
  for (const auto* p : {&map_ply, &map_xyz, &metrics_json, &manifest_json}) {
    if (p->empty()) continue;
    if (!outputs.insert(p->lexically_normal()).second)
      throw std::invalid_argument("output paths must be distinct");
  }
  if (map_ply.empty() || metrics_json.empty() || manifest_json.empty())
    throw std::invalid_argument("map_ply, metrics_json and manifest_json required");
}

PipelineConfig pipeline_config_from_json(const json& j,
                                         const fs::path& base_dir) {
  PipelineConfig cfg;
  cfg.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("sonar")) {
    const auto& s = j.at("sonar");
    if (s.contains("horizontal"))
      cfg.horizontal = intrinsics_from_json(s.at("horizontal"), cfg.horizontal);
    if (s.contains("vertical"))
      cfg.vertical = intrinsics_from_json(s.at("vertical"), cfg.vertical);
  }
  if (j.contains("extrinsics"))
    cfg.extrinsics = extrinsics_from_json(j.at("extrinsics"));
  if (j.contains("mounts")) {
    const auto& m = j.at("mounts");
    if (m.contains("sonar_horizontal"))
      cfg.sonar_mount = transform_from_json(m.at("sonar_horizontal"));
    if (m.contains("lidar")) cfg.lidar_mount = transform_from_json(m.at("lidar"));
  }
  if (j.contains("preprocess")) {
    const auto& p = j.at("preprocess");
    if (p.contains("horizontal"))
      cfg.preprocess_horizontal =
          preprocess_from_json(p.at("horizontal"), cfg.preprocess_horizontal);
    if (p.contains("vertical"))
      cfg.preprocess_vertical =
          preprocess_from_json(p.at("vertical"), cfg.preprocess_vertical);
  }
  if (j.contains("leading_edge")) {
    read(j.at("leading_edge"), "tau_horizontal", cfg.leading_edge.tau_horizontal);
    read(j.at("leading_edge"), "tau_vertical", cfg.leading_edge.tau_vertical);
  }
  if (j.contains("detect")) {
    const auto& d = j.at("detect");
    if (d.contains("horizontal"))
      cfg.stereo.cfar_horizontal =
          cfar_from_json(d.at("horizontal"), cfg.stereo.cfar_horizontal);
    if (d.contains("vertical"))
      cfg.stereo.cfar_vertical =
          cfar_from_json(d.at("vertical"), cfg.stereo.cfar_vertical);
    if (d.contains("dbscan")) cfg.stereo.dbscan = dbscan_from_json(d.at("dbscan"));
  }
  if (j.contains("association")) {
    read(j.at("association"), "neighbor_step", cfg.stereo.association.neighbor_step);
    read(j.at("association"), "normalize_units",
         cfg.stereo.association.normalize_units);
  }
  if (j.contains("keyframes")) {
    read(j.at("keyframes"), "translation_m", cfg.keyframes.translation);
    read(j.at("keyframes"), "rotation_rad", cfg.keyframes.rotation);
  }
  if (j.contains("pairing")) read(j.at("pairing"), "window_s", cfg.pairing_window);

  if (j.contains("simulation"))
    cfg.simulation = simulation_from_json(j.at("simulation"), cfg.seed);
  if (j.contains("inputs")) {
    const auto& in = j.at("inputs");
    if (in.contains("frames_dir"))
      cfg.frames_dir = resolve(base_dir, in.at("frames_dir"));
    if (in.contains("trajectory_csv"))
      cfg.trajectory_csv = resolve(base_dir, in.at("trajectory_csv"));
    if (in.contains("lidar_dir"))
      cfg.lidar_dir = resolve(base_dir, in.at("lidar_dir"));
  }
  const json out = j.value("outputs", json::object());
  cfg.map_ply = resolve(base_dir, out.value("map_ply", std::string("map.ply")));
  if (out.contains("map_xyz")) cfg.map_xyz = resolve(base_dir, out.at("map_xyz"));
  cfg.metrics_json =
      resolve(base_dir, out.value("metrics_json", std::string("metrics.json")));
  cfg.manifest_json =
      resolve(base_dir, out.value("manifest_json", std::string("manifest.json")));
  if (j.contains("evaluate")) cfg.evaluation = evaluation_from_json(j.at("evaluate"));
  cfg.validate();
  return cfg;
}

std::string sha256_hex(const std::string& data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(),
             nullptr);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace seasky
