#include <algorithm>

#include <gtest/gtest.h>

#include "seasky/io.h"
#include "seasky/pipeline.h"
#include "test_support.h"

namespace seasky {
namespace {

using nlohmann::json;

PipelineConfig short_config(double length = 3.0, bool noise = true) {
  auto j = testing::short_canal_config(length);
  if (!noise) j["simulation"].erase("noise");
  return pipeline_config_from_json(j, "/tmp");
}

TEST(PingTimes, SpanInclusiveGrid) {
  TrajectoryParams p;
  p.length = 1.0;
  const auto t = ping_times(generate_trajectory(p), 4.0);
  EXPECT_EQ(t, (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
}

TEST(PairFrames, NearestWithinWindowEarlierOnTie) {
  const std::vector<double> h{0.0, 0.1, 0.2, 0.3};
  const std::vector<double> v{0.05, 0.19, 0.5};
  const auto pairs = pair_frames(h, v, 0.075);
  EXPECT_EQ(pairs, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {2, 1}}));
  EXPECT_TRUE(pair_frames(h, {}, 0.075).empty());
  EXPECT_TRUE(pair_frames(h, {0.05}, 0.01).empty());
}

TEST(PairFrames, EveryVerticalFrameWithinWindow) {
  const auto h = ping_times(generate_trajectory({}), 15.0);
  const auto v = ping_times(generate_trajectory({}), 10.0);
  const auto pairs = pair_frames(h, v, 0.075);
  EXPECT_EQ(pairs.size(), v.size());
  for (const auto& [i, k] : pairs) EXPECT_LE(std::abs(h[i] - v[k]), 0.075);
}

TEST(SimulateDataset, FrameCountsFollowPingRates) {
  const auto cfg = short_config();
  const auto sim = simulate_dataset(cfg);
  EXPECT_EQ(sim.data.horizontal.size(), 46u);  // 3 s at 15 Hz, inclusive
  EXPECT_EQ(sim.data.vertical.size(), 31u);
  EXPECT_EQ(sim.horizontal_truth.size(), sim.data.horizontal.size());
  EXPECT_EQ(sim.data.trajectory.size(), 31u);
  EXPECT_EQ(sim.data.lidar.size(), select_keyframes(sim.data.trajectory).size());
  EXPECT_TRUE(std::is_sorted(sim.data.horizontal.begin(), sim.data.horizontal.end(),
                             [](const auto& a, const auto& b) {
                               return a.timestamp() < b.timestamp();
                             }));
}

TEST(AssembleMap, AllChannelsPresentAndThreadCountInvariant) {
  const auto cfg = short_config();
  const auto sim = simulate_dataset(cfg);
  const auto one = assemble_map(sim.data, cfg, 1);
  const auto four = assemble_map(sim.data, cfg, 4);
  for (auto c : {MapChannel::kLidar, MapChannel::kStereo, MapChannel::kEdgeH,
                 MapChannel::kEdgeV})
    EXPECT_GT(one.map.count(c), 0u) << to_string(c);
  EXPECT_EQ(encode_map_ply(one.map), encode_map_ply(four.map));
  EXPECT_EQ(one.counts.pairs, 31u);
  EXPECT_FALSE(one.map.keyframes.empty());
}

TEST(AssembleMap, StereoPointsLieNearTheWall) {
  const auto cfg = short_config();
  const auto run = assemble_map(simulate_dataset(cfg).data, cfg, 0);
  const auto stereo = channel_points(run.map.points, MapChannel::kStereo);
  ASSERT_FALSE(stereo.empty());
  std::vector<double> y;
  for (const auto& p : stereo) y.push_back(p.y());
  std::nth_element(y.begin(), y.begin() + y.size() / 2, y.end());
  EXPECT_NEAR(y[y.size() / 2], 3.0, 0.3);
}

TEST(AssembleMap, EmptySceneProducesEmptySonarChannels) {
  auto j = testing::short_canal_config();
  j["simulation"]["scene"]["surfaces"] = json::array();
  j["simulation"].erase("noise");
  const auto cfg = pipeline_config_from_json(j, "/tmp");
  const auto run = assemble_map(simulate_dataset(cfg).data, cfg, 0);
  EXPECT_EQ(run.map.points.size(), 0u);
  EXPECT_FALSE(run.map.keyframes.empty());
}

TEST(ChannelPoints, FiltersChannelAndSegment) {
  const std::vector<MapPoint> pts{{{1, 0, 0}, MapChannel::kLidar, 0},
                                  {{5, 0, 0}, MapChannel::kLidar, 0},
                                  {{5, 1, 0}, MapChannel::kStereo, 0}};
  EXPECT_EQ(channel_points(pts, MapChannel::kLidar).size(), 2u);
  EXPECT_EQ(channel_points(pts, MapChannel::kLidar, std::pair(4.0, 6.0)).size(), 1u);
}

TEST(DatasetRoundTrip, WrittenDatasetReloadsToSameMap) {
  // Noise-free images hold integer intensities, so the PGM trip is lossless.
  auto cfg = short_config(2.0, false);
  const auto sim = simulate_dataset(cfg);
  const auto dir = testing::fresh_dir("dataset_roundtrip");
  write_dataset(sim, dir);
  auto disk = cfg;
  disk.simulation.reset();
  disk.frames_dir = dir / "frames";
  disk.trajectory_csv = dir / "trajectory.csv";
  disk.lidar_dir = dir / "lidar";
  std::vector<std::string> warnings;
  const auto loaded = load_dataset(disk, warnings);
  EXPECT_TRUE(warnings.empty());
  EXPECT_EQ(loaded.horizontal.size(), sim.data.horizontal.size());
  EXPECT_EQ(loaded.lidar.size(), sim.data.lidar.size());
  EXPECT_EQ(encode_map_ply(assemble_map(loaded, disk, 0).map),
            encode_map_ply(assemble_map(sim.data, cfg, 0).map));
}

TEST(LoadDataset, MissingTrajectoryAndCorruptFrame) {
  auto cfg = short_config(1.0);
  const auto dir = testing::fresh_dir("dataset_errors");
  write_dataset(simulate_dataset(cfg), dir);
  cfg.simulation.reset();
  cfg.frames_dir = dir / "frames";
  cfg.trajectory_csv = dir / "nope.csv";
  std::vector<std::string> warnings;
  EXPECT_THROW(load_dataset(cfg, warnings), DataError);
  cfg.trajectory_csv = dir / "trajectory.csv";
  write_file_atomic(dir / "frames" / "h_000000.pgm", "garbage");
  const auto data = load_dataset(cfg, warnings);
  EXPECT_EQ(warnings.size(), 1u);
  EXPECT_EQ(data.horizontal.size(), 15u);
}

TEST(RenderMapOutputs, MetricsAndManifest) {
  const auto cfg = short_config();
  const auto run = assemble_map(simulate_dataset(cfg).data, cfg, 0);
  const auto out = render_map_outputs(run, cfg, "{}");
  const auto metrics = json::parse(out.metrics);
  const auto manifest = json::parse(out.manifest);
  EXPECT_EQ(metrics.at("points_per_channel").at("stereo").get<std::size_t>(),
            run.map.count(MapChannel::kStereo));
  EXPECT_TRUE(metrics.at("evaluation").contains("hellinger"));
  EXPECT_EQ(manifest.at("config_sha256"), sha256_hex("{}"));
  EXPECT_EQ(manifest.at("version"), kToolVersion);
  EXPECT_EQ(decode_map_ply(out.ply).size(), run.map.points.size());
}

}  // namespace
}  // namespace seasky
