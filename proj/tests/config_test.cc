#include <stdexcept>

#include <gtest/gtest.h>
#include <json.hpp>

#include "seasky/config.h"

namespace seasky {
namespace {

using nlohmann::json;

json minimal() {
  return json::parse(R"({"inputs": {"frames_dir": "f", "trajectory_csv": "t.csv"}})");
}

TEST(PipelineConfig, DefaultsAndRelativePaths) {
  const auto cfg = pipeline_config_from_json(minimal(), "/data/run");
  EXPECT_EQ(cfg.frames_dir, "/data/run/f");
  EXPECT_EQ(cfg.trajectory_csv, "/data/run/t.csv");
  EXPECT_EQ(cfg.map_ply, "/data/run/map.ply");
  EXPECT_EQ(cfg.metrics_json, "/data/run/metrics.json");
  EXPECT_TRUE(cfg.map_xyz.empty());
  EXPECT_EQ(cfg.horizontal.num_beams, 512);
  EXPECT_EQ(cfg.vertical.num_beams, 256);
  EXPECT_EQ(cfg.pairing_window, 0.075);
  EXPECT_FALSE(cfg.simulation.has_value());
  EXPECT_FALSE(cfg.evaluation.has_value());
}

TEST(PipelineConfig, RequiresInputsUnlessSimulating) {
  EXPECT_THROW(pipeline_config_from_json(json::object(), "."), std::invalid_argument);
  const auto cfg = pipeline_config_from_json(json::parse(R"({"simulation": {}})"), ".");
  ASSERT_TRUE(cfg.simulation.has_value());
  EXPECT_EQ(cfg.simulation->frame_policy, FramePolicy::kPingRates);
  EXPECT_EQ(cfg.simulation->ping_rate_horizontal, 15.0);
  EXPECT_EQ(cfg.simulation->ping_rate_vertical, 10.0);
}

TEST(PipelineConfig, RejectsCollidingOutputs) {
  auto j = minimal();
  j["outputs"] = {{"map_ply", "a.out"}, {"metrics_json", "a.out"}};
  EXPECT_THROW(pipeline_config_from_json(j, "."), std::invalid_argument);
}

TEST(PipelineConfig, RejectsOutOfDomainValues) {
  for (const char* bad : {
           R"({"sonar": {"horizontal": {"num_beams": 0}}})",
           R"({"sonar": {"vertical": {"max_range_m": -1}}})",
           R"({"detect": {"horizontal": {"pfa": 1.5}}})",
           R"({"detect": {"dbscan": {"epsilon": 0}}})",
           R"({"preprocess": {"horizontal": {"open_kernel": [2, 3]}}})",
           R"({"pairing": {"window_s": -0.1}})",
           R"({"keyframes": {"translation_m": 0}})",
           R"({"evaluate": {"cosine_mode": "cosmic"}})",
           R"({"evaluate": {"channel_a": "radar"}})"}) {
    auto j = minimal();
    j.merge_patch(json::parse(bad));
    EXPECT_THROW(pipeline_config_from_json(j, "."), std::exception) << bad;
  }
}

TEST(PipelineConfig, SimulationSection) {
  auto j = minimal();
  j["seed"] = 5;
  j["simulation"] = json::parse(R"({
    "scene": {"water_level": 1.0, "surfaces": [
      {"type": "plane", "origin": [0, 3, -4], "edges": [[10, 0, 0], [0, 0, 6]]},
      {"type": "box", "origin": [1, 1, 1], "extent": [1, 2, 3], "reflectivity": 0.5}]},
    "trajectory": {"kind": "arc", "radius_m": 7, "speed_mps": 0.5},
    "noise": {"speckle_density": 0.01},
    "frame_policy": "synchronized",
    "sonar": {"gain": 8}
  })");
  const auto cfg = pipeline_config_from_json(j, ".");
  const auto& sim = *cfg.simulation;
  EXPECT_EQ(sim.scene.planes.size(), 1u);
  ASSERT_EQ(sim.scene.boxes.size(), 1u);
  EXPECT_EQ(sim.scene.boxes[0].max_corner, Eigen::Vector3d(2, 3, 4));
  EXPECT_EQ(sim.scene.water_level, 1.0);
  EXPECT_EQ(sim.trajectory.kind, TrajectoryKind::kArc);
  EXPECT_EQ(sim.trajectory.radius, 7.0);
  EXPECT_TRUE(sim.noise_enabled);
  EXPECT_EQ(sim.noise.seed, 5u);
  EXPECT_EQ(sim.frame_policy, FramePolicy::kSynchronized);
  EXPECT_EQ(sim.sonar.gain, 8.0);

  j["simulation"]["scene"]["surfaces"][0]["type"] = "sphere";
  EXPECT_THROW(pipeline_config_from_json(j, "."), std::invalid_argument);
}

TEST(ExtrinsicsFromJson, TranslationBeforeRotation) {
  const auto ext = extrinsics_from_json(
      json::parse(R"({"translation_m": [0.05, 0.0, -0.10]})"));
  const Eigen::Vector3d p(1, 2, 3);
  const Eigen::Matrix3d rx =
      Eigen::AngleAxisd(-kPi / 2, Eigen::Vector3d::UnitX()).toRotationMatrix();
  EXPECT_LT((ext.vertical_to_horizontal * p -
             rx * (p + Eigen::Vector3d(0.05, 0.0, -0.10))).norm(), 1e-12);
}

TEST(TransformFromJson, AxisAngleDegrees) {
  const auto t = transform_from_json(json::parse(
      R"({"rotation_axis": [0, 0, 1], "rotation_deg": 90, "translation_m": [1, 0, 0]})"));
  EXPECT_LT((t * Eigen::Vector3d(1, 0, 0) - Eigen::Vector3d(1, 1, 0)).norm(), 1e-12);
}

TEST(Sha256, KnownDigests) {
  EXPECT_EQ(sha256_hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // namespace
}  // namespace seasky
