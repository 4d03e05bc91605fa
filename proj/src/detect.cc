#include "seasky/detect.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>

namespace seasky {

void CfarConfig::validate() const {
  if (reference_cells <= 0)
    throw std::invalid_argument("reference_cells must be positive");
  if (guard_cells < 0) throw std::invalid_argument("guard_cells must be >= 0");
  if (!(pfa > 0.0 && pfa < 1.0))
    throw std::invalid_argument("pfa must lie in (0, 1)");
}

double CfarConfig::alpha() const {
  const double n = reference_cells;
  return n * (std::pow(pfa, -1.0 / n) - 1.0);
}

std::vector<PolarIndex> soca_cfar(const PolarSonarImage& img,
                                  const CfarConfig& cfg) {
  cfg.validate();
  const int n = img.rows();
  const int ref = cfg.reference_cells;
  const int guard = cfg.guard_cells;
  // Every cell needs at least one complete reference window.
  if (2 * (ref + guard) > n) {
    throw std::invalid_argument("CFAR windows (" +
                                std::to_string(2 * (ref + guard)) +
                                " cells) exceed column length " +
                                std::to_string(n));
  }
  const double alpha = cfg.alpha();
  std::vector<PolarIndex> detections;
  std::vector<double> prefix(n + 1);
  for (int c = 0; c < img.cols(); ++c) {
    prefix[0] = 0.0;
    for (int r = 0; r < n; ++r) prefix[r + 1] = prefix[r] + img.at(r, c);
    auto window_mean = [&](int first, int last) {  // inclusive
      return (prefix[last + 1] - prefix[first]) / ref;
    };
    for (int r = 0; r < n; ++r) {
      const double v = img.at(r, c);
      if (v < cfg.min_intensity) continue;
      const bool has_lead = r - guard - ref >= 0;
      const bool has_lag = r + guard + ref <= n - 1;
      double noise;
      if (has_lead && has_lag) {
        noise = std::min(window_mean(r - guard - ref, r - guard - 1),
                         window_mean(r + guard + 1, r + guard + ref));
      } else if (has_lead) {
        noise = window_mean(r - guard - ref, r - guard - 1);
      } else {
        noise = window_mean(r + guard + 1, r + guard + ref);
      }
      if (v > alpha * noise) detections.push_back({r, c});
    }
  }
  return detections;
}

void DbscanConfig::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (min_samples < 1) throw std::invalid_argument("min_samples must be >= 1");
}

namespace {

// Uniform hash grid with cell size epsilon; neighbors live in the 27 cells
// around a point.
class NeighborGrid {
 public:
  NeighborGrid(const std::vector<FeaturePoint>& points, double cell)
      : points_(points), cell_(cell) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      cells_[key(cell_of(points[i].x), cell_of(points[i].y),
                 cell_of(points[i].z))]
          .push_back(static_cast<int>(i));
    }
  }

  void query(int i, double eps2, std::vector<int>& out) const {
    out.clear();
    const auto& p = points_[i];
    const long cx = cell_of(p.x), cy = cell_of(p.y), cz = cell_of(p.z);
    for (long dx = -1; dx <= 1; ++dx) {
      for (long dy = -1; dy <= 1; ++dy) {
        for (long dz = -1; dz <= 1; ++dz) {
          auto it = cells_.find(key(cx + dx, cy + dy, cz + dz));
          if (it == cells_.end()) continue;
          for (int j : it->second) {
            const auto& q = points_[j];
            const double ddx = p.x - q.x, ddy = p.y - q.y, ddz = p.z - q.z;
            if (ddx * ddx + ddy * ddy + ddz * ddz <= eps2) out.push_back(j);
          }
        }
      }
    }
    std::sort(out.begin(), out.end());
  }

 private:
  long cell_of(double v) const { return static_cast<long>(std::floor(v / cell_)); }
  static std::uint64_t key(long x, long y, long z) {
    const auto h = [](long v) { return static_cast<std::uint64_t>(v) & 0x1FFFFF; };
    return (h(x) << 42) | (h(y) << 21) | h(z);
  }

  const std::vector<FeaturePoint>& points_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

}  // namespace

std::vector<int> dbscan(const std::vector<FeaturePoint>& points,
                        const DbscanConfig& cfg) {
  cfg.validate();
  const int n = static_cast<int>(points.size());
  std::vector<int> labels(n, kNoise);
  if (n == 0) return labels;

  const NeighborGrid grid(points, cfg.epsilon);
  const double eps2 = cfg.epsilon * cfg.epsilon;
  std::vector<std::vector<int>> neighbors(n);
  std::vector<bool> core(n);
  for (int i = 0; i < n; ++i) {
    grid.query(i, eps2, neighbors[i]);
    core[i] = static_cast<int>(neighbors[i].size()) >= cfg.min_samples;
  }

  // Connected components of core points.
  int next_cluster = 0;
  std::vector<int> stack;
  for (int i = 0; i < n; ++i) {
    if (!core[i] || labels[i] != kNoise) continue;
    const int cluster = next_cluster++;
    labels[i] = cluster;
    stack.assign(1, i);
    while (!stack.empty()) {
      const int j = stack.back();
      stack.pop_back();
      for (int k : neighbors[j]) {
        if (core[k] && labels[k] == kNoise) {
          labels[k] = cluster;
          stack.push_back(k);
        }
      }
    }
  }

  // Border points join the cluster of their nearest core neighbor, ties
  // broken by the core point's coordinates.
  auto coords = [&](int i) {
    return std::tuple(points[i].x, points[i].y, points[i].z);
  };
  for (int i = 0; i < n; ++i) {
    if (core[i]) continue;
    int best = -1;
    double best_d2 = 0.0;
    for (int k : neighbors[i]) {
      if (!core[k]) continue;
      const double dx = points[i].x - points[k].x;
      const double dy = points[i].y - points[k].y;
      const double dz = points[i].z - points[k].z;
      const double d2 = dx * dx + dy * dy + dz * dz;
      if (best < 0 || d2 < best_d2 ||
          (d2 == best_d2 && coords(k) < coords(best))) {
        best = k;
        best_d2 = d2;
      }
    }
    if (best >= 0) labels[i] = labels[best];
  }
  return labels;
}

}  // namespace seasky
