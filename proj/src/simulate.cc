#include "seasky/simulate.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace seasky {

namespace {

// Portable draws on top of mt19937_64 (the std distributions are
// implementation-defined).
double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = gen();
  } while (x >= limit);
  return x % bound;
}

std::optional<RayHit> intersect_patch(const PlanePatch& patch,
                                      const Eigen::Vector3d& o,
                                      const Eigen::Vector3d& d) {
  const Eigen::Vector3d n = patch.edge_u.cross(patch.edge_v);
  const double denom = n.dot(d);
  if (std::abs(denom) < 1e-15) return std::nullopt;
  const double t = n.dot(patch.origin - o) / denom;
  if (!(t > 0.0)) return std::nullopt;
  const Eigen::Vector3d p = o + t * d;
  const Eigen::Vector3d rel = p - patch.origin;
  // Solve rel = a u + b v in the least-squares sense (exact on the plane).
  const double uu = patch.edge_u.dot(patch.edge_u);
  const double uv = patch.edge_u.dot(patch.edge_v);
  const double vv = patch.edge_v.dot(patch.edge_v);
  const double ru = rel.dot(patch.edge_u);
  const double rv = rel.dot(patch.edge_v);
  const double det = uu * vv - uv * uv;
  const double a = (ru * vv - rv * uv) / det;
  const double b = (rv * uu - ru * uv) / det;
  if (a < 0.0 || a > 1.0 || b < 0.0 || b > 1.0) return std::nullopt;
  RayHit hit;
  hit.distance = t;
  hit.point = p;
  hit.normal = n.normalized();
  hit.reflectivity = patch.reflectivity;
  return hit;
}

std::optional<RayHit> intersect_box(const AxisAlignedBox& box,
                                    const Eigen::Vector3d& o,
                                    const Eigen::Vector3d& d) {
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  int axis_near = -1;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(d[k]) < 1e-300) {
      if (o[k] < box.min_corner[k] || o[k] > box.max_corner[k])
        return std::nullopt;
      continue;
    }
    double t0 = (box.min_corner[k] - o[k]) / d[k];
    double t1 = (box.max_corner[k] - o[k]) / d[k];
    if (t0 > t1) std::swap(t0, t1);
    if (t0 > t_near) {
      t_near = t0;
      axis_near = k;
    }
    t_far = std::min(t_far, t1);
  }
  // Rays starting inside a box see nothing of it.
  if (axis_near < 0 || t_near > t_far || !(t_near > 0.0)) return std::nullopt;
  RayHit hit;
  hit.distance = t_near;
  hit.point = o + t_near * d;
  // Snap the hit onto its face plane.
  hit.point[axis_near] =
      d[axis_near] > 0.0 ? box.min_corner[axis_near] : box.max_corner[axis_near];
  hit.normal = Eigen::Vector3d::Zero();
  hit.normal[axis_near] = d[axis_near] > 0.0 ? -1.0 : 1.0;
  hit.reflectivity = box.reflectivity;
  return hit;
}

}  // namespace

void Scene::validate() const {
  for (const auto& p : planes) {
    if (!(p.edge_u.cross(p.edge_v).norm() > 1e-12))
      throw std::invalid_argument("plane patch has degenerate edges");
    if (!(p.reflectivity > 0.0 && p.reflectivity <= 1.0))
      throw std::invalid_argument("reflectivity must lie in (0, 1]");
  }
  for (const auto& b : boxes) {
    if (!((b.max_corner - b.min_corner).minCoeff() > 0.0))
      throw std::invalid_argument("box has degenerate extent");
    if (!(b.reflectivity > 0.0 && b.reflectivity <= 1.0))
      throw std::invalid_argument("reflectivity must lie in (0, 1]");
  }
}

std::optional<RayHit> cast_ray(const Scene& scene,
                               const Eigen::Vector3d& origin,
                               const Eigen::Vector3d& direction,
                               double max_distance) {
  const Eigen::Vector3d d = direction.normalized();
  std::optional<RayHit> best;
  auto consider = [&](std::optional<RayHit> hit, int surface) {
    if (!hit || hit->distance > max_distance) return;
    if (!best || hit->distance < best->distance) {
      hit->surface = surface;
      best = hit;
    }
  };
  int surface = 0;
  for (const auto& p : scene.planes) consider(intersect_patch(p, origin, d), surface++);
  for (const auto& b : scene.boxes) consider(intersect_box(b, origin, d), surface++);
  return best;
}

SimulatedSonarFrame raycast_sonar(const Scene& scene,
                                  const RigidTransform& sensor_to_world,
                                  const SonarIntrinsics& intrinsics,
                                  double timestamp,
                                  const SonarSimConfig& cfg) {
  if (cfg.elevation_rays < 1)
    throw std::invalid_argument("elevation_rays must be positive");
  SimulatedSonarFrame frame{PolarSonarImage(intrinsics, timestamp), {}};
  PolarSonarImage& img = frame.image;
  const Eigen::Vector3d origin = sensor_to_world.translation();
  const Eigen::Matrix3d& rot = sensor_to_world.rotation();
  const double half = 0.5 * intrinsics.vertical_aperture;
  const double dr = intrinsics.range_resolution();
  const double ceiling = intrinsics.max_intensity();

  for (int c = 0; c < intrinsics.num_beams; ++c) {
    const double bearing = bearing_of_column(intrinsics, c);
    for (int k = 0; k < cfg.elevation_rays; ++k) {
      const double elev =
          -half + (k + 0.5) * intrinsics.vertical_aperture / cfg.elevation_rays;
      const Eigen::Vector3d dir_sensor(std::cos(elev) * std::cos(bearing),
                                       std::cos(elev) * std::sin(bearing),
                                       std::sin(elev));
      const auto hit =
          cast_ray(scene, origin, rot * dir_sensor, intrinsics.max_range);
      if (!hit || hit->point.z() > scene.water_level) continue;
      if (hit->distance < intrinsics.min_range) continue;
      const int bin = std::min(
          intrinsics.num_range_bins - 1,
          static_cast<int>(std::floor((hit->distance - intrinsics.min_range) / dr)));
      double& cell = img.at(bin, c);
      cell = std::min(ceiling, cell + cfg.gain * hit->reflectivity);
      frame.hits.push_back({{bin, c}, hit->point, hit->distance * dir_sensor,
                            hit->normal, hit->surface});
    }
  }
  return frame;
}

LidarPattern LidarPattern::default_pattern() {
  LidarPattern p;
  for (int i = 0; i < 16; ++i) p.elevations.push_back(deg2rad(-15.0 + 2.0 * i));
  return p;
}

std::vector<CartesianPoint> raycast_lidar(const Scene& scene,
                                          const RigidTransform& sensor_to_world,
                                          const LidarPattern& pattern) {
  std::vector<CartesianPoint> out;
  const Eigen::Vector3d origin = sensor_to_world.translation();
  for (double elev : pattern.elevations) {
    for (int a = 0; a < pattern.azimuth_steps; ++a) {
      const double az = -kPi + 2.0 * kPi * a / pattern.azimuth_steps;
      const Eigen::Vector3d dir_sensor(std::cos(elev) * std::cos(az),
                                       std::cos(elev) * std::sin(az),
                                       std::sin(elev));
      const auto hit = cast_ray(scene, origin,
                                sensor_to_world.rotation() * dir_sensor,
                                pattern.max_range);
      if (!hit || hit->distance < pattern.min_range) continue;
      if (!(hit->point.z() > scene.water_level)) continue;
      out.push_back(from_eigen(sensor_to_world.inverse() * hit->point,
                               hit->reflectivity));
    }
  }
  return out;
}

void NoiseModel::validate() const {
  if (!(speckle_density >= 0.0 && speckle_density <= 1.0))
    throw std::invalid_argument("speckle density must lie in [0, 1]");
  if (!(speckle_min <= speckle_max) || speckle_min < 0.0)
    throw std::invalid_argument("invalid speckle intensity range");
  if (row_bias_amplitude < 0.0)
    throw std::invalid_argument("row bias amplitude must be >= 0");
}

NoisyImage apply_noise(const PolarSonarImage& img, const NoiseModel& model) {
  model.validate();
  NoisyImage out{img, {}};
  std::vector<double>& data = out.image.data();
  const double ceiling = img.intrinsics().max_intensity();
  std::mt19937_64 gen(model.seed);

  if (model.row_bias_amplitude > 0.0) {
    for (int r = 0; r < img.rows(); ++r) {
      const double bias = model.row_bias_amplitude * uniform01(gen);
      for (int c = 0; c < img.cols(); ++c) {
        double& v = data[static_cast<std::size_t>(r) * img.cols() + c];
        v = std::min(ceiling, v + bias);
      }
    }
  }

  const std::size_t n = data.size();
  const auto count =
      static_cast<std::size_t>(std::llround(model.speckle_density * n));
  if (count > 0) {
    // Partial Fisher-Yates over pixel indices.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = 0; i < count; ++i) {
      std::swap(order[i], order[i + uniform_below(gen, n - i)]);
    }
    out.speckle_pixels.assign(order.begin(), order.begin() + count);
    std::sort(out.speckle_pixels.begin(), out.speckle_pixels.end());
    for (std::size_t idx : out.speckle_pixels) {
      const double value = model.speckle_min +
                           (model.speckle_max - model.speckle_min) * uniform01(gen);
      data[idx] = std::min(ceiling, data[idx] + value);
    }
  }
  return out;
}

TrajectoryKind trajectory_kind_from_string(const std::string& name) {
  if (name == "line") return TrajectoryKind::kLine;
  if (name == "arc") return TrajectoryKind::kArc;
  if (name == "lawnmower") return TrajectoryKind::kLawnmower;
  throw std::invalid_argument("unknown trajectory kind '" + name + "'");
}

void TrajectoryParams::validate() const {
  if (!(speed > 0.0)) throw std::invalid_argument("speed must be > 0");
  if (!(rate > 0.0)) throw std::invalid_argument("rate must be > 0");
  if (!(length >= 0.0)) throw std::invalid_argument("length must be >= 0");
  if (kind == TrajectoryKind::kArc && !(radius > 0.0))
    throw std::invalid_argument("arc radius must be > 0");
  if (kind == TrajectoryKind::kLawnmower) {
    if (lanes < 1) throw std::invalid_argument("lawnmower needs >= 1 lane");
    if (!(lane_spacing > 0.0))
      throw std::invalid_argument("lane spacing must be > 0");
  }
}

namespace {

struct PathSegment {
  bool is_arc = false;
  Eigen::Vector2d start;  // lines
  double heading = 0.0;
  Eigen::Vector2d center;  // arcs
  double radius = 0.0;
  double start_angle = 0.0;
  double turn = 1.0;  // +1 left, -1 right
  double length = 0.0;
};

struct PathState {
  Eigen::Vector2d position;
  double heading = 0.0;
};

PathState evaluate(const PathSegment& seg, double s) {
  if (!seg.is_arc) {
    return {seg.start + s * Eigen::Vector2d(std::cos(seg.heading),
                                            std::sin(seg.heading)),
            seg.heading};
  }
  const double angle = seg.start_angle + seg.turn * s / seg.radius;
  return {seg.center + seg.radius * Eigen::Vector2d(std::cos(angle),
                                                    std::sin(angle)),
          angle + seg.turn * kPi / 2.0};
}

PathSegment make_line(const PathState& from, double length) {
  PathSegment seg;
  seg.start = from.position;
  seg.heading = from.heading;
  seg.length = length;
  return seg;
}

PathSegment make_arc(const PathState& from, double radius, double sweep) {
  PathSegment seg;
  seg.is_arc = true;
  seg.turn = sweep >= 0.0 ? 1.0 : -1.0;
  seg.radius = radius;
  const Eigen::Vector2d left(-std::sin(from.heading), std::cos(from.heading));
  seg.center = from.position + seg.turn * radius * left;
  seg.start_angle = from.heading - seg.turn * kPi / 2.0;
  seg.length = radius * std::abs(sweep);
  return seg;
}

}  // namespace

Trajectory generate_trajectory(const TrajectoryParams& params) {
  params.validate();
  std::vector<PathSegment> segments;
  PathState state{params.start.head<2>(), params.heading};
  switch (params.kind) {
    case TrajectoryKind::kLine:
      segments.push_back(make_line(state, params.length));
      break;
    case TrajectoryKind::kArc:
      segments.push_back(make_arc(state, params.radius, params.sweep));
      break;
    case TrajectoryKind::kLawnmower:
      for (int lane = 0; lane < params.lanes; ++lane) {
        segments.push_back(make_line(state, params.length));
        state = evaluate(segments.back(), segments.back().length);
        if (lane + 1 == params.lanes) break;
        const double sweep = (lane % 2 == 0) ? kPi : -kPi;
        segments.push_back(make_arc(state, params.lane_spacing / 2.0, sweep));
        state = evaluate(segments.back(), segments.back().length);
      }
      break;
  }

  double total = 0.0;
  for (const auto& s : segments) total += s.length;
  const double step = params.speed / params.rate;
  const auto count =
      static_cast<std::size_t>(std::floor(total / step + 1e-9)) + 1;

  std::vector<Pose> poses;
  poses.reserve(count);
  std::size_t seg_index = 0;
  double seg_start = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double s = std::min(total, k * step);
    while (seg_index + 1 < segments.size() &&
           s > seg_start + segments[seg_index].length) {
      seg_start += segments[seg_index].length;
      ++seg_index;
    }
    const PathState st = evaluate(segments[seg_index], s - seg_start);
    Pose pose;
    pose.timestamp = params.start_time + k / params.rate;
    pose.translation = {st.position.x(), st.position.y(), params.start.z()};
    pose.rotation = Eigen::Quaterniond(
        Eigen::AngleAxisd(st.heading, Eigen::Vector3d::UnitZ()));
    pose.rotation.normalize();
    poses.push_back(pose);
  }
  return Trajectory(std::move(poses));
}

}  // namespace seasky
