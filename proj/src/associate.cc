#include "seasky/associate.h"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace seasky {

namespace {

Eigen::Vector4d scaled(const FeatureDescriptor& d, const AssociationConfig& cfg,
                       double max_range) {
  Eigen::Vector4d v = d.vector();
  if (cfg.normalize_units) {
    v[0] /= max_range;
    v.tail<3>() /= 255.0;
  }
  return v;
}

}  // namespace

ClusterDescriptor cluster_descriptor(const std::vector<FeaturePoint>& members) {
  if (members.empty()) throw std::invalid_argument("empty cluster");
  ClusterDescriptor d;
  d.x_min = d.x_max = members.front().x;
  double sum = 0.0;
  for (const auto& m : members) {
    sum += m.x;
    d.x_min = std::min(d.x_min, m.x);
    d.x_max = std::max(d.x_max, m.x);
  }
  d.mu = sum / static_cast<double>(members.size());
  double sq = 0.0;
  for (const auto& m : members) sq += (m.x - d.mu) * (m.x - d.mu);
  d.sigma2 = sq / static_cast<double>(members.size());
  return d;
}

Assignment match_clusters(const std::vector<ClusterDescriptor>& h_clusters,
                          const std::vector<ClusterDescriptor>& v_clusters) {
  Eigen::MatrixXd cost(h_clusters.size(), v_clusters.size());
  for (std::size_t i = 0; i < h_clusters.size(); ++i) {
    for (std::size_t j = 0; j < v_clusters.size(); ++j) {
      cost(i, j) = (h_clusters[i].vector() - v_clusters[j].vector()).norm();
    }
  }
  return solve_assignment(cost);
}

FeatureDescriptor feature_descriptor(const FeaturePoint& f,
                                     const PolarSonarImage& img,
                                     const AssociationConfig& cfg) {
  const auto& in = img.intrinsics();
  const PolarIndex origin = f.polar_origin;
  if (origin.range_bin < 0 || origin.range_bin >= img.rows() ||
      origin.column < 0 || origin.column >= img.cols()) {
    throw std::out_of_range("feature origin outside image");
  }
  const double gamma = img.at(origin.range_bin, origin.column);
  const CartesianPoint center = project_planar(
      range_of_bin(in, origin.range_bin), bearing_of_column(in, origin.column));
  const double step = cfg.neighbor_step * in.range_resolution();

  // Out-of-field neighbors replicate the feature's own cell.
  auto sample = [&](double dx, double dy) {
    const auto idx =
        polar_index_of(in, {center.x + dx, center.y + dy, 0.0, 0.0});
    return idx ? img.at(idx->range_bin, idx->column) : gamma;
  };

  FeatureDescriptor d;
  d.x = f.x;
  d.gamma = gamma;
  d.gamma_bar_x = (sample(-step, 0.0) + gamma + sample(step, 0.0)) / 3.0;
  d.gamma_bar_y = (sample(0.0, -step) + gamma + sample(0.0, step)) / 3.0;
  d.source = f.source;
  return d;
}

std::vector<std::pair<int, int>> match_features(
    const std::vector<FeaturePoint>& h_members,
    const std::vector<FeaturePoint>& v_members, const PolarSonarImage& h_img,
    const PolarSonarImage& v_img, const AssociationConfig& cfg) {
  std::vector<Eigen::Vector4d> hd, vd;
  hd.reserve(h_members.size());
  vd.reserve(v_members.size());
  const double max_range = h_img.intrinsics().max_range;
  for (const auto& f : h_members)
    hd.push_back(scaled(feature_descriptor(f, h_img, cfg), cfg, max_range));
  for (const auto& f : v_members)
    vd.push_back(scaled(feature_descriptor(f, v_img, cfg), cfg, max_range));

  Eigen::MatrixXd cost(hd.size(), vd.size());
  for (std::size_t i = 0; i < hd.size(); ++i) {
    for (std::size_t j = 0; j < vd.size(); ++j) {
      cost(i, j) = (hd[i] - vd[j]).norm();
    }
  }
  std::vector<std::pair<int, int>> out;
  for (const auto& [i, j] : solve_assignment(cost).pairs) {
    out.emplace_back(h_members[i].id, v_members[j].id);
  }
  return out;
}

FusedPoint fuse(const FeaturePoint& h, const FeaturePoint& v) {
  return {0.5 * (h.x + v.x), 0.5 * (h.y + v.y), 0.5 * (h.z + v.z), h.id, v.id};
}

std::vector<FeaturePoint> extract_features(const PolarSonarImage& img,
                                           const CfarConfig& cfg,
                                           SonarSource source,
                                           const SonarExtrinsics& ext) {
  const auto& in = img.intrinsics();
  const auto detections = soca_cfar(img, cfg);
  std::vector<FeaturePoint> out;
  out.reserve(detections.size());
  for (std::size_t k = 0; k < detections.size(); ++k) {
    const PolarIndex idx = detections[k];
    CartesianPoint p =
        project_planar(range_of_bin(in, idx.range_bin),
                       bearing_of_column(in, idx.column),
                       img.at(idx.range_bin, idx.column));
    if (source == SonarSource::kVertical) {
      p = apply(ext.vertical_to_horizontal, p);
    }
    FeaturePoint f;
    f.id = static_cast<int>(k);
    f.x = p.x;
    f.y = p.y;
    f.z = p.z;
    f.intensity = p.intensity;
    f.source = source;
    f.polar_origin = idx;
    out.push_back(f);
  }
  return out;
}

namespace {

// Groups clustered features by label, noise dropped; labels ascend.
std::vector<std::vector<FeaturePoint>> group_clusters(
    std::vector<FeaturePoint>& features, const DbscanConfig& cfg) {
  const auto labels = dbscan(features, cfg);
  std::map<int, std::vector<FeaturePoint>> groups;
  for (std::size_t i = 0; i < features.size(); ++i) {
    features[i].cluster_id = labels[i];
    if (labels[i] != kNoise) groups[labels[i]].push_back(features[i]);
  }
  std::vector<std::vector<FeaturePoint>> out;
  out.reserve(groups.size());
  for (auto& [label, members] : groups) out.push_back(std::move(members));
  return out;
}

}  // namespace

StereoResult stereo_pipeline(const PolarSonarImage& h_img,
                             const PolarSonarImage& v_img,
                             const SonarExtrinsics& ext,
                             const StereoConfig& cfg) {
  StereoResult result;
  auto h_all = extract_features(h_img, cfg.cfar_horizontal,
                                SonarSource::kHorizontal, ext);
  auto v_all =
      extract_features(v_img, cfg.cfar_vertical, SonarSource::kVertical, ext);
  result.h_detections = static_cast<int>(h_all.size());
  result.v_detections = static_cast<int>(v_all.size());

  const OverlapRegion overlap(ext, h_img.intrinsics(), v_img.intrinsics());
  auto in_overlap = [&](const FeaturePoint& f) {
    return overlap.contains({f.x, f.y, f.z, f.intensity});
  };
  std::copy_if(h_all.begin(), h_all.end(),
               std::back_inserter(result.h_features), in_overlap);
  std::copy_if(v_all.begin(), v_all.end(),
               std::back_inserter(result.v_features), in_overlap);
  if (result.h_features.empty() || result.v_features.empty()) return result;

  const auto h_clusters = group_clusters(result.h_features, cfg.dbscan);
  const auto v_clusters = group_clusters(result.v_features, cfg.dbscan);
  result.h_clusters = static_cast<int>(h_clusters.size());
  result.v_clusters = static_cast<int>(v_clusters.size());

  std::vector<ClusterDescriptor> hd, vd;
  for (const auto& c : h_clusters) hd.push_back(cluster_descriptor(c));
  for (const auto& c : v_clusters) vd.push_back(cluster_descriptor(c));
  const Assignment cluster_pairs = match_clusters(hd, vd);
  result.cluster_pairs = static_cast<int>(cluster_pairs.pairs.size());

  std::map<int, const FeaturePoint*> h_by_id, v_by_id;
  for (const auto& f : result.h_features) h_by_id[f.id] = &f;
  for (const auto& f : result.v_features) v_by_id[f.id] = &f;

  for (const auto& [hc, vc] : cluster_pairs.pairs) {
    const auto matches = match_features(h_clusters[hc], v_clusters[vc], h_img,
                                        v_img, cfg.association);
    for (const auto& [h_id, v_id] : matches) {
      result.points.push_back(fuse(*h_by_id.at(h_id), *v_by_id.at(v_id)));
    }
  }
  return result;
}

}  // namespace seasky
