#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "seasky/config.h"
#include "seasky/evaluate.h"
#include "seasky/io.h"
#include "seasky/pipeline.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace seasky;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct ConfigSource {
  PipelineConfig config;
  std::string text;
};

ConfigSource load_config(const fs::path& path,
                         std::optional<std::uint64_t> seed) {
  if (!fs::is_regular_file(path))
    throw DataError("config not found: " + path.string());
  ConfigSource src;
  src.text = read_file(path);
  json j;
  try {
    j = json::parse(src.text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("config is not valid JSON: ") + e.what());
  }
  if (seed) j["seed"] = *seed;
  src.text = j.dump();
  try {
    src.config = pipeline_config_from_json(j, path.parent_path());
  } catch (const std::exception& e) {
    throw DataError(std::string("invalid config: ") + e.what());
  }
  return src;
}

void rebase_outputs(PipelineConfig& cfg, const fs::path& dir) {
  for (fs::path* p :
       {&cfg.map_ply, &cfg.map_xyz, &cfg.metrics_json, &cfg.manifest_json})
    if (!p->empty()) *p = dir / p->filename();
}

void create_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

int run_simulate(const fs::path& config, const fs::path& out_dir,
                 std::optional<std::uint64_t> seed) {
  const ConfigSource src = load_config(config, seed);
  if (!src.config.simulation)
    throw DataError("config has no simulation section");
  const SimulatedDataset sim = simulate_dataset(src.config);
  write_dataset(sim, out_dir);
  std::cout << "wrote " << sim.data.horizontal.size() << " horizontal and "
            << sim.data.vertical.size() << " vertical frames, "
            << sim.data.lidar.size() << " lidar scans, "
            << sim.data.trajectory.size() << " poses to " << out_dir.string()
            << "\n";
  return kExitOk;
}

struct MapFlags {
  fs::path config;
  std::string output_dir;
  std::string frames_dir;
  std::string trajectory;
  std::string lidar_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

int run_map(const MapFlags& flags) {
  ConfigSource src = load_config(flags.config, flags.seed);
  PipelineConfig& cfg = src.config;
  if (!flags.frames_dir.empty()) cfg.frames_dir = flags.frames_dir;
  if (!flags.trajectory.empty()) cfg.trajectory_csv = flags.trajectory;
  if (!flags.lidar_dir.empty()) cfg.lidar_dir = flags.lidar_dir;
  if (!flags.output_dir.empty()) rebase_outputs(cfg, flags.output_dir);

  std::vector<std::string> warnings;
  Dataset data;
  if (cfg.frames_dir.empty() && cfg.simulation) {
    data = simulate_dataset(cfg).data;
  } else {
    data = load_dataset(cfg, warnings);
  }
  MapRun run = assemble_map(data, cfg, flags.threads);
  run.warnings.insert(run.warnings.begin(), warnings.begin(), warnings.end());
  run.counts.skipped_frames += warnings.size();
  for (const auto& w : run.warnings) std::cerr << "warning: " << w << "\n";
  if (run.counts.frames_horizontal + run.counts.frames_vertical ==
      run.counts.skipped_frames)
    throw DataError("all frames were skipped");

  const MapOutputs out = render_map_outputs(run, cfg, src.text);
  for (const fs::path* p : {&cfg.map_ply, &cfg.map_xyz, &cfg.metrics_json,
                            &cfg.manifest_json})
    if (!p->empty()) create_parent(*p);
  write_file_atomic(cfg.map_ply, out.ply);
  if (!cfg.map_xyz.empty()) write_file_atomic(cfg.map_xyz, out.xyz);
  write_file_atomic(cfg.metrics_json, out.metrics);
  write_file_atomic(cfg.manifest_json, out.manifest);
  std::cout << "map: " << run.map.points.size() << " points, "
            << run.map.keyframes.size() << " keyframes -> "
            << cfg.map_ply.string() << "\n";
  return kExitOk;
}

struct EvalFlags {
  std::string map;
  std::string cloud_a;
  std::string cloud_b;
  std::string channel_a = "stereo";
  std::string channel_b = "lidar";
  std::string config;
  std::vector<double> segment;
  std::string align_source;
  std::string align_target;
  std::string output;
  std::string kde_csv;
};

std::vector<Eigen::Vector3d> load_xyz(const std::string& path) {
  if (!fs::is_regular_file(path)) throw DataError("cloud not found: " + path);
  return decode_xyz(read_file(path));
}

int run_eval(const EvalFlags& flags) {
  EvaluationConfig settings;
  if (!flags.config.empty()) {
    if (!fs::is_regular_file(flags.config))
      throw DataError("config not found: " + flags.config);
    try {
      const json j = json::parse(read_file(flags.config));
      settings = evaluation_from_json(j.contains("evaluate") ? j.at("evaluate") : j);
    } catch (const json::exception& e) {
      throw DataError(std::string("invalid eval config: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw DataError(std::string("invalid eval config: ") + e.what());
    }
  }
  if (!flags.segment.empty())
    settings.segment_x = std::pair(flags.segment[0], flags.segment[1]);

  std::vector<Eigen::Vector3d> a, b;
  if (!flags.map.empty()) {
    if (!fs::is_regular_file(flags.map))
      throw DataError("map not found: " + flags.map);
    const auto points = decode_map_ply(read_file(flags.map));
    if (flags.config.empty()) {
      settings.channel_a = channel_from_string(flags.channel_a);
      settings.channel_b = channel_from_string(flags.channel_b);
    }
    a = channel_points(points, settings.channel_a, settings.segment_x);
    b = channel_points(points, settings.channel_b, settings.segment_x);
  } else {
    auto filter = [&](std::vector<Eigen::Vector3d> pts) {
      if (!settings.segment_x) return pts;
      std::erase_if(pts, [&](const Eigen::Vector3d& p) {
        return p.x() < settings.segment_x->first || p.x() > settings.segment_x->second;
      });
      return pts;
    };
    a = filter(load_xyz(flags.cloud_a));
    b = filter(load_xyz(flags.cloud_b));
  }

  json report;
  try {
    report = comparison_to_json(compare_distributions(a, b, settings.distribution));
    if (!flags.align_source.empty()) {
      report["alignment"] = alignment_to_json(
          rigid_align(load_xyz(flags.align_source), load_xyz(flags.align_target)));
    }
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  } catch (const std::domain_error& e) {
    throw DataError(e.what());
  }
  report["points_a"] = a.size();
  report["points_b"] = b.size();

  const std::string text = report.dump(2) + "\n";
  if (flags.output.empty()) {
    std::cout << text;
  } else {
    create_parent(flags.output);
    write_file_atomic(flags.output, text);
  }
  if (!flags.kde_csv.empty()) {
    create_parent(flags.kde_csv);
    write_file_atomic(flags.kde_csv,
                      kde_csv(compare_distributions(a, b, settings.distribution)));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orthogonal sonar stereo fusion and seabed-to-sky mapping"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset");
  std::string sim_config, sim_out;
  sim->add_option("-c,--config", sim_config, "Config with a simulation section")
      ->required();
  sim->add_option("-o,--output-dir", sim_out, "Dataset directory")->required();
  sim->add_option("--seed", seed, "Override the config seed");

  auto* map = app.add_subcommand("map", "Assemble the seabed-to-sky map");
  MapFlags mf;
  std::string map_config;
  map->add_option("-c,--config", map_config, "Pipeline config")->required();
  map->add_option("-o,--output-dir", mf.output_dir,
                  "Directory for map, metrics and manifest");
  map->add_option("--frames", mf.frames_dir, "Frames directory");
  map->add_option("--trajectory", mf.trajectory, "Trajectory CSV");
  map->add_option("--lidar", mf.lidar_dir, "LiDAR scan directory");
  map->add_option("--seed", seed, "Override the config seed");
  map->add_option("-j,--threads", mf.threads, "Worker threads (0 = auto)")
      ->check(CLI::NonNegativeNumber);

  auto* eval = app.add_subcommand("eval", "Compare two point clouds");
  EvalFlags ef;
  auto* map_opt = eval->add_option("--map", ef.map, "Map PLY");
  auto* a_opt = eval->add_option("--cloud-a", ef.cloud_a, "XYZ cloud A");
  auto* b_opt = eval->add_option("--cloud-b", ef.cloud_b, "XYZ cloud B");
  a_opt->needs(b_opt)->excludes(map_opt);
  b_opt->needs(a_opt)->excludes(map_opt);
  eval->add_option("--channel-a", ef.channel_a, "Map channel for cloud A")
      ->needs(map_opt);
  eval->add_option("--channel-b", ef.channel_b, "Map channel for cloud B")
      ->needs(map_opt);
  eval->add_option("-c,--config", ef.config, "Config with an evaluate section");
  eval->add_option("--segment-x", ef.segment, "Keep points with x in [lo, hi]")
      ->expected(2);
  auto* src_opt =
      eval->add_option("--align-source", ef.align_source, "Reference points");
  auto* dst_opt =
      eval->add_option("--align-target", ef.align_target, "Reference targets");
  src_opt->needs(dst_opt);
  dst_opt->needs(src_opt);
  eval->add_option("-o,--output", ef.output, "Metrics JSON (default stdout)");
  eval->add_option("--kde-csv", ef.kde_csv, "KDE curves as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (*eval && ef.map.empty() && ef.cloud_a.empty()) {
    std::cerr << "eval: --map or --cloud-a/--cloud-b required\n";
    return kExitUsage;
  }

  try {
    if (*sim) return run_simulate(sim_config, sim_out, seed);
    if (*map) {
      mf.config = map_config;
      mf.seed = seed;
      return run_map(mf);
    }
    return run_eval(ef);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
