#pragma once

#include <optional>
#include <vector>

#include "seasky/sonar_core.h"

namespace seasky {

struct CfarConfig {
  int reference_cells = 16;
  int guard_cells = 8;
  double pfa = 0.2;
  double min_intensity = 100.0;

  void validate() const;
  // alpha = N (pfa^(-1/N) - 1), N = reference_cells.
  double alpha() const;

  static CfarConfig horizontal_default() { return {16, 8, 0.2, 100.0}; }
  static CfarConfig vertical_default() { return {24, 8, 0.2, 130.0}; }
};

// Smallest-of-cell-averages CFAR along the range axis of every column.
// Returns detections in column-major order (column, then ascending bin).
std::vector<PolarIndex> soca_cfar(const PolarSonarImage& img,
                                  const CfarConfig& cfg);

inline constexpr int kNoise = -1;

struct FeaturePoint {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;
  SonarSource source = SonarSource::kHorizontal;
  PolarIndex polar_origin;
  int cluster_id = kNoise;
};

struct DbscanConfig {
  double epsilon = 0.20;
  int min_samples = 20;

  void validate() const;
};

// Labels in input order; clusters numbered 0.. by their first core point in
// input order, noise is kNoise. A point is core when at least min_samples
// points (itself included) lie within epsilon. A border point reachable from
// several clusters joins the one holding its nearest core neighbor.
std::vector<int> dbscan(const std::vector<FeaturePoint>& points,
                        const DbscanConfig& cfg);

}  // namespace seasky
