#include "seasky/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "seasky/associate.h"
#include "seasky/io.h"
#include "seasky/leading_edge.h"
#include "seasky/preprocess.h"

namespace seasky {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string frame_stem(const char* prefix, std::size_t index) {
  std::ostringstream os;
  os << prefix << std::setw(6) << std::setfill('0') << index;
  return os.str();
}

RigidTransform sonar_to_world(const Pose& pose, const RigidTransform& mount) {
  return pose.body_to_world() * mount;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::vector<double> timestamps(const std::vector<PolarSonarImage>& frames) {
  std::vector<double> t;
  t.reserve(frames.size());
  for (const auto& f : frames) t.push_back(f.timestamp());
  return t;
}

struct FrameResult {
  bool ok = false;
  std::string error;
  PolarSonarImage processed;
  std::vector<StampedPoint> edges;  // horizontal sonar frame
};

struct PairResult {
  bool ok = false;
  std::string error;
  std::vector<StampedPoint> fused;  // horizontal sonar frame
};

}  // namespace

std::vector<double> ping_times(const Trajectory& trajectory, double rate_hz) {
  if (!(rate_hz > 0.0)) throw std::invalid_argument("rate must be > 0");
  std::vector<double> out;
  if (trajectory.empty()) return out;
  const double span = trajectory.end_time() - trajectory.start_time();
  const auto n = static_cast<std::size_t>(std::floor(span * rate_hz + 1e-9));
  for (std::size_t k = 0; k <= n; ++k)
    out.push_back(
        std::min(trajectory.start_time() + static_cast<double>(k) / rate_hz,
                 trajectory.end_time()));
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> pair_frames(
    const std::vector<double>& horizontal_times,
    const std::vector<double>& vertical_times, double window) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t v = 0; v < vertical_times.size(); ++v) {
    const double t = vertical_times[v];
    std::size_t best = horizontal_times.size();
    double best_dt = window;
    for (std::size_t h = 0; h < horizontal_times.size(); ++h) {
      const double dt = std::abs(horizontal_times[h] - t);
      if (dt < best_dt || (dt == best_dt && best == horizontal_times.size())) {
        best = h;
        best_dt = dt;
      }
    }
    if (best < horizontal_times.size()) pairs.emplace_back(best, v);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

SimulatedDataset simulate_dataset(const PipelineConfig& cfg) {
  if (!cfg.simulation) throw std::invalid_argument("no simulation section");
  const SimulationConfig& sim = *cfg.simulation;
  SimulatedDataset out;
  out.data.trajectory = generate_trajectory(sim.trajectory);
  const Trajectory& traj = out.data.trajectory;

  std::vector<double> h_times, v_times;
  if (sim.frame_policy == FramePolicy::kSynchronized) {
    for (const auto& p : traj.poses()) h_times.push_back(p.timestamp);
    v_times = h_times;
  } else {
    h_times = ping_times(traj, sim.ping_rate_horizontal);
    v_times = ping_times(traj, sim.ping_rate_vertical);
  }

  auto render = [&](const std::vector<double>& times, SonarSource source,
                    std::vector<PolarSonarImage>& frames,
                    std::vector<std::vector<GroundTruthHit>>& truth) {
    frames.resize(times.size());
    truth.resize(times.size());
    const bool vertical = source == SonarSource::kVertical;
    const SonarIntrinsics& in = vertical ? cfg.vertical : cfg.horizontal;
    parallel_for(times.size(), 0, [&](std::size_t k) {
      RigidTransform to_world = sonar_to_world(traj.pose_at(times[k]),
                                               cfg.sonar_mount);
      if (vertical) to_world = to_world * cfg.extrinsics.vertical_to_horizontal;
      SimulatedSonarFrame f =
          raycast_sonar(sim.scene, to_world, in, times[k], sim.sonar);
      if (sim.noise_enabled) {
        NoiseModel noise = sim.noise;
        noise.seed = cfg.seed * 0x9E3779B97F4A7C15ULL +
                     (static_cast<std::uint64_t>(k) << 1) + (vertical ? 1 : 0);
        f.image = apply_noise(f.image, noise).image;
      }
      frames[k] = std::move(f.image);
      truth[k] = std::move(f.hits);
    });
  };
  render(h_times, SonarSource::kHorizontal, out.data.horizontal,
         out.horizontal_truth);
  render(v_times, SonarSource::kVertical, out.data.vertical,
         out.vertical_truth);

  const std::vector<Keyframe> keyframes =
      select_keyframes(traj, cfg.keyframes);
  out.data.lidar.resize(keyframes.size());
  parallel_for(keyframes.size(), 0, [&](std::size_t k) {
    const Pose& pose = keyframes[k].pose;
    out.data.lidar[k].timestamp = pose.timestamp;
    out.data.lidar[k].points =
        raycast_lidar(sim.scene, pose.body_to_world() * cfg.lidar_mount,
                      sim.lidar);
  });
  return out;
}

MapRun assemble_map(const Dataset& data, const PipelineConfig& cfg,
                    int threads) {
  MapRun run;
  run.counts.frames_horizontal = data.horizontal.size();
  run.counts.frames_vertical = data.vertical.size();

  // Stage 1: per-frame preprocessing and leading edges.
  const std::size_t nh = data.horizontal.size();
  std::vector<FrameResult> frames(nh + data.vertical.size());
  parallel_for(frames.size(), threads, [&](std::size_t i) {
    const bool vertical = i >= nh;
    const PolarSonarImage& img =
        vertical ? data.vertical[i - nh] : data.horizontal[i];
    FrameResult& r = frames[i];
    try {
      r.processed = preprocess(img, vertical ? cfg.preprocess_vertical
                                             : cfg.preprocess_horizontal);
      const SonarSource src =
          vertical ? SonarSource::kVertical : SonarSource::kHorizontal;
      const LineScan scan =
          detect_leading_edge(r.processed, cfg.leading_edge.tau(src), src);
      r.edges.reserve(scan.points.size());
      for (const auto& e : scan.points) {
        Eigen::Vector3d p = to_eigen(e.point);
        if (vertical) p = cfg.extrinsics.vertical_to_horizontal * p;
        r.edges.push_back({p, img.timestamp()});
      }
      r.ok = true;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  });

  // Stage 2: stereo fusion on paired frames.
  const auto pairs = pair_frames(timestamps(data.horizontal),
                                 timestamps(data.vertical), cfg.pairing_window);
  run.counts.pairs = pairs.size();
  std::vector<PairResult> fused(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t i) {
    const auto [h, v] = pairs[i];
    const FrameResult& fh = frames[h];
    const FrameResult& fv = frames[nh + v];
    PairResult& r = fused[i];
    if (!fh.ok || !fv.ok) {
      r.error = "unprocessed frame in pair";
      return;
    }
    try {
      const StereoResult s = stereo_pipeline(fh.processed, fv.processed,
                                             cfg.extrinsics, cfg.stereo);
      const double t = data.horizontal[h].timestamp();
      for (const auto& p : s.points) r.fused.push_back({{p.x, p.y, p.z}, t});
      r.ok = true;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  });

  // Single-writer assembly, ordered by frame index.
  run.map.keyframes = select_keyframes(data.trajectory, cfg.keyframes);
  for (const Keyframe& kf : run.map.keyframes) {
    const LidarScan* best = nullptr;
    for (const auto& scan : data.lidar) {
      const double dt = std::abs(scan.timestamp - kf.pose.timestamp);
      if (dt <= cfg.pairing_window &&
          (!best || dt < std::abs(best->timestamp - kf.pose.timestamp)))
        best = &scan;
    }
    if (!best) continue;
    const Pose pose = data.trajectory.covers(best->timestamp)
                          ? data.trajectory.pose_at(best->timestamp)
                          : kf.pose;
    attach_lidar_scan(run.map, best->points, pose, cfg.lidar_mount);
    ++run.counts.lidar_scans;
  }

  std::vector<StampedPoint> stereo;
  for (std::size_t i = 0; i < fused.size(); ++i) {
    if (!fused[i].ok) {
      run.warnings.push_back("pair " + std::to_string(i) +
                             " skipped: " + fused[i].error);
      continue;
    }
    stereo.insert(stereo.end(), fused[i].fused.begin(), fused[i].fused.end());
  }
  std::vector<StampedPoint> edge_h, edge_v;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (!frames[i].ok) {
      ++run.counts.skipped_frames;
      run.warnings.push_back(std::string(i < nh ? "horizontal" : "vertical") +
                             " frame " + std::to_string(i < nh ? i : i - nh) +
                             " skipped: " + frames[i].error);
      continue;
    }
    auto& dst = i < nh ? edge_h : edge_v;
    dst.insert(dst.end(), frames[i].edges.begin(), frames[i].edges.end());
  }
  for (const auto& [points, channel] :
       {std::pair{&stereo, MapChannel::kStereo},
        std::pair{&edge_h, MapChannel::kEdgeH},
        std::pair{&edge_v, MapChannel::kEdgeV}}) {
    const AttachStats st = attach_sonar_data(run.map, *points, channel,
                                             cfg.sonar_mount, data.trajectory);
    run.counts.rejected_points += st.rejected;
  }
  return run;
}

std::vector<Eigen::Vector3d> channel_points(
    const std::vector<MapPoint>& points, MapChannel channel,
    std::optional<std::pair<double, double>> segment) {
  std::vector<Eigen::Vector3d> out;
  for (const auto& p : points) {
    if (p.channel != channel) continue;
    if (segment && (p.position.x() < segment->first ||
                    p.position.x() > segment->second))
      continue;
    out.push_back(p.position);
  }
  return out;
}

json comparison_to_json(const DistributionComparison& cmp) {
  return {
      {"wall_width_a", cmp.wall_width_a},
      {"wall_width_b", cmp.wall_width_b},
      {"width_diff", cmp.width_diff},
      {"mean_cosine", cmp.mean_cosine},
      {"hellinger", cmp.hellinger},
      {"kde",
       {{"centers", cmp.kde_a.centers},
        {"density_a", cmp.kde_a.densities},
        {"density_b", cmp.kde_b.densities},
        {"bin_width", cmp.kde_a.bin_width},
        {"bandwidth_a", cmp.kde_a.bandwidth},
        {"bandwidth_b", cmp.kde_b.bandwidth}}},
  };
}

json alignment_to_json(const AlignmentResult& r) {
  json rot = json::array();
  for (int i = 0; i < 3; ++i)
    rot.push_back({r.rotation(i, 0), r.rotation(i, 1), r.rotation(i, 2)});
  return {{"rotation", rot},
          {"translation",
           {r.translation.x(), r.translation.y(), r.translation.z()}},
          {"residuals", r.residuals},
          {"mean_error", r.mean_error},
          {"ci95_half_width", r.ci95_half_width}};
}

std::string kde_csv(const DistributionComparison& cmp) {
  std::string out = "x,density_a,density_b\n";
  for (std::size_t i = 0; i < cmp.kde_a.centers.size(); ++i) {
    out += format_double(cmp.kde_a.centers[i]) + "," +
           format_double(cmp.kde_a.densities[i]) + "," +
           format_double(cmp.kde_b.densities[i]) + "\n";
  }
  return out;
}

Dataset load_dataset(const PipelineConfig& cfg,
                     std::vector<std::string>& warnings) {
  Dataset data;
  if (!fs::is_regular_file(cfg.trajectory_csv))
    throw DataError("trajectory not found: " + cfg.trajectory_csv.string());
  data.trajectory = decode_trajectory_csv(read_file(cfg.trajectory_csv));
  if (!fs::is_directory(cfg.frames_dir))
    throw DataError("frames directory not found: " + cfg.frames_dir.string());

  std::vector<fs::path> stems;
  for (const auto& entry : fs::directory_iterator(cfg.frames_dir)) {
    if (entry.path().extension() == ".json")
      stems.push_back(entry.path().parent_path() / entry.path().stem());
  }
  std::sort(stems.begin(), stems.end());
  for (const auto& stem : stems) {
    const std::string name = stem.filename().string();
    const bool h = name.rfind("h_", 0) == 0;
    const bool v = name.rfind("v_", 0) == 0;
    if (!h && !v) continue;
    try {
      (h ? data.horizontal : data.vertical).push_back(read_frame(stem));
    } catch (const std::exception& e) {
      warnings.push_back("frame " + name + " skipped: " + e.what());
    }
  }
  if (data.horizontal.empty() && data.vertical.empty())
    throw DataError("no readable frames in " + cfg.frames_dir.string());
  auto by_time = [](const PolarSonarImage& a, const PolarSonarImage& b) {
    return a.timestamp() < b.timestamp();
  };
  std::stable_sort(data.horizontal.begin(), data.horizontal.end(), by_time);
  std::stable_sort(data.vertical.begin(), data.vertical.end(), by_time);

  if (!cfg.lidar_dir.empty()) {
    if (!fs::is_directory(cfg.lidar_dir))
      throw DataError("lidar directory not found: " + cfg.lidar_dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(cfg.lidar_dir))
      if (entry.path().extension() == ".xyz") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const std::string text = read_file(f);
      LidarScan scan;
      const std::string key = "# timestamp:";
      const auto pos = text.find(key);
      if (pos == std::string::npos)
        throw DataError("lidar scan without timestamp: " + f.string());
      scan.timestamp = std::stod(text.substr(pos + key.size()));
      for (const auto& p : decode_xyz(text)) scan.points.push_back(from_eigen(p));
      data.lidar.push_back(std::move(scan));
    }
  }
  return data;
}

void write_dataset(const SimulatedDataset& sim, const fs::path& out_dir) {
  fs::create_directories(out_dir / "frames");
  fs::create_directories(out_dir / "lidar");
  fs::create_directories(out_dir / "ground_truth");
  const Dataset& d = sim.data;
  auto write_truth = [&](const fs::path& path,
                         const std::vector<GroundTruthHit>& hits) {
    std::string text = "# x y z surface range_bin column (world frame)\n";
    for (const auto& g : hits) {
      text += format_double(g.world.x()) + " " + format_double(g.world.y()) +
              " " + format_double(g.world.z()) + " " +
              std::to_string(g.surface) + " " +
              std::to_string(g.cell.range_bin) + " " +
              std::to_string(g.cell.column) + "\n";
    }
    write_file_atomic(path, text);
  };
  for (std::size_t i = 0; i < d.horizontal.size(); ++i) {
    write_frame(out_dir / "frames" / frame_stem("h_", i), d.horizontal[i]);
    write_truth(out_dir / "ground_truth" / (frame_stem("h_", i) + ".xyz"),
                sim.horizontal_truth[i]);
  }
  for (std::size_t i = 0; i < d.vertical.size(); ++i) {
    write_frame(out_dir / "frames" / frame_stem("v_", i), d.vertical[i]);
    write_truth(out_dir / "ground_truth" / (frame_stem("v_", i) + ".xyz"),
                sim.vertical_truth[i]);
  }
  for (std::size_t i = 0; i < d.lidar.size(); ++i) {
    std::string text =
        "# timestamp: " + format_double(d.lidar[i].timestamp) + "\n";
    for (const auto& p : d.lidar[i].points)
      text += format_double(p.x) + " " + format_double(p.y) + " " +
              format_double(p.z) + "\n";
    write_file_atomic(out_dir / "lidar" / (frame_stem("scan_", i) + ".xyz"),
                      text);
  }
  write_file_atomic(out_dir / "trajectory.csv",
                    encode_trajectory_csv(d.trajectory));
}

MapOutputs render_map_outputs(const MapRun& run, const PipelineConfig& cfg,
                              const std::string& config_text) {
  MapOutputs out;
  out.ply = encode_map_ply(run.map);
  if (!cfg.map_xyz.empty()) out.xyz = encode_map_xyz(run.map);

  json counts = json::object();
  for (MapChannel c : {MapChannel::kLidar, MapChannel::kStereo,
                       MapChannel::kEdgeH, MapChannel::kEdgeV})
    counts[to_string(c)] = run.map.count(c);

  json metrics = {
      {"points_per_channel", counts},
      {"keyframes", run.map.keyframes.size()},
      {"frames_horizontal", run.counts.frames_horizontal},
      {"frames_vertical", run.counts.frames_vertical},
      {"pairs", run.counts.pairs},
      {"skipped_frames", run.counts.skipped_frames},
      {"rejected_points", run.counts.rejected_points},
      {"lidar_scans", run.counts.lidar_scans},
      {"warnings", run.warnings.size()},
  };
  if (cfg.evaluation) {
    const EvaluationConfig& ev = *cfg.evaluation;
    const auto a = channel_points(run.map.points, ev.channel_a, ev.segment_x);
    const auto b = channel_points(run.map.points, ev.channel_b, ev.segment_x);
    try {
      json e = comparison_to_json(compare_distributions(a, b, ev.distribution));
      e["cloud_a"] = to_string(ev.channel_a);
      e["cloud_b"] = to_string(ev.channel_b);
      e["points_a"] = a.size();
      e["points_b"] = b.size();
      metrics["evaluation"] = e;
    } catch (const std::exception& ex) {
      metrics["evaluation"] = {{"error", ex.what()}};
    }
  }
  out.metrics = metrics.dump(2) + "\n";

  const json manifest = {
      {"tool", "seasky"},
      {"version", kToolVersion},
      {"config_sha256", sha256_hex(config_text)},
      {"seed", cfg.seed},
      {"simulated", cfg.simulation.has_value() && cfg.frames_dir.empty()},
      {"points_per_channel", counts},
      {"outputs",
       {{"map_ply", cfg.map_ply.filename().string()},
        {"metrics_json", cfg.metrics_json.filename().string()}}},
  };
  out.manifest = manifest.dump(2) + "\n";
  return out;
}

}  // namespace seasky
