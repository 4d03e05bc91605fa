#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "seasky/assignment.h"
#include "seasky/detect.h"
#include "seasky/geometry.h"
#include "seasky/sonar_core.h"

namespace seasky {

// [mu, sigma^2, x_min, x_max] over the member x-coordinates (horizontal
// frame), population variance.
struct ClusterDescriptor {
  double mu = 0.0;
  double sigma2 = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;

  Eigen::Vector4d vector() const { return {mu, sigma2, x_min, x_max}; }
};

// Local intensity context of a feature. gamma_bar_x / gamma_bar_y are the
// 3-cell means along the x and y axes of the feature's own Cartesian sonar
// image. vector() swaps them for the vertical sonar.
struct FeatureDescriptor {
  double x = 0.0;
  double gamma = 0.0;
  double gamma_bar_x = 0.0;
  double gamma_bar_y = 0.0;
  SonarSource source = SonarSource::kHorizontal;

  Eigen::Vector4d vector() const {
    return source == SonarSource::kHorizontal
               ? Eigen::Vector4d(x, gamma, gamma_bar_x, gamma_bar_y)
               : Eigen::Vector4d(x, gamma, gamma_bar_y, gamma_bar_x);
  }
};

struct FusedPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  int h_id = 0;
  int v_id = 0;
};

struct AssociationConfig {
  // Cartesian step to the neighbor cells, in range-resolution units.
  double neighbor_step = 1.0;
  // Off: descriptor components mix meters and intensity as-is. On: x is
  // divided by max_range and intensities by 255.
  bool normalize_units = false;
};

struct StereoConfig {
  CfarConfig cfar_horizontal = CfarConfig::horizontal_default();
  CfarConfig cfar_vertical = CfarConfig::vertical_default();
  DbscanConfig dbscan;
  AssociationConfig association;
};

// Throws std::invalid_argument for an empty member list.
ClusterDescriptor cluster_descriptor(const std::vector<FeaturePoint>& members);

// Minimum total L2 descriptor distance, size min(|H|, |V|). Pairs are
// (h index, v index).
Assignment match_clusters(const std::vector<ClusterDescriptor>& h_clusters,
                          const std::vector<ClusterDescriptor>& v_clusters);

// `img` is the feature's own (preprocessed) polar image.
FeatureDescriptor feature_descriptor(const FeaturePoint& f,
                                     const PolarSonarImage& img,
                                     const AssociationConfig& cfg = {});

// Minimum-cost bijection between the members of a matched cluster pair.
// Returns (h id, v id) pairs.
std::vector<std::pair<int, int>> match_features(
    const std::vector<FeaturePoint>& h_members,
    const std::vector<FeaturePoint>& v_members, const PolarSonarImage& h_img,
    const PolarSonarImage& v_img, const AssociationConfig& cfg = {});

// Componentwise mean of the two source points.
FusedPoint fuse(const FeaturePoint& h, const FeaturePoint& v);

struct StereoResult {
  std::vector<FusedPoint> points;
  // Features after trimming, horizontal frame, with cluster labels.
  std::vector<FeaturePoint> h_features;
  std::vector<FeaturePoint> v_features;
  int h_detections = 0;
  int v_detections = 0;
  int h_clusters = 0;
  int v_clusters = 0;
  int cluster_pairs = 0;
};

// CFAR features in sonar-own coordinates, vertical ones mapped into the
// horizontal frame. Ids are the detection index.
std::vector<FeaturePoint> extract_features(const PolarSonarImage& img,
                                           const CfarConfig& cfg,
                                           SonarSource source,
                                           const SonarExtrinsics& ext);

// Both images preprocessed. Detection, projection, trimming, clustering,
// cluster matching, feature matching and fusion.
StereoResult stereo_pipeline(const PolarSonarImage& h_img,
                             const PolarSonarImage& v_img,
                             const SonarExtrinsics& ext,
                             const StereoConfig& cfg = {});

}  // namespace seasky
