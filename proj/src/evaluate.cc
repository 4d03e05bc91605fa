#include "seasky/evaluate.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace seasky {

AlignmentResult rigid_align(const std::vector<Eigen::Vector3d>& source,
                            const std::vector<Eigen::Vector3d>& target) {
  if (source.size() != target.size())
    throw std::invalid_argument("correspondence counts differ");
  if (source.size() < 3)
    throw std::invalid_argument("need at least 3 correspondences");
  const auto n = static_cast<double>(source.size());

  Eigen::Vector3d cs = Eigen::Vector3d::Zero(), ct = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < source.size(); ++i) {
    cs += source[i];
    ct += target[i];
  }
  cs /= n;
  ct /= n;

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d spread = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < source.size(); ++i) {
    const Eigen::Vector3d a = source[i] - cs;
    cov += (target[i] - ct) * a.transpose();
    spread += a * a.transpose();
  }
  // Collinear sets have a rank-1 scatter matrix.
  const Eigen::Vector3d ev =
      Eigen::JacobiSVD<Eigen::Matrix3d>(spread).singularValues();
  if (!(ev[1] > 1e-12 * std::max(1.0, ev[0])))
    throw std::invalid_argument("source points are collinear");

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0)
    d(2, 2) = -1.0;

  AlignmentResult result;
  result.rotation = svd.matrixU() * d * svd.matrixV().transpose();
  result.translation = ct - result.rotation * cs;
  result.residuals.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    result.residuals.push_back(
        (result.rotation * source[i] + result.translation - target[i]).norm());
  }
  result.mean_error =
      std::accumulate(result.residuals.begin(), result.residuals.end(), 0.0) / n;
  double sq = 0.0;
  for (double r : result.residuals)
    sq += (r - result.mean_error) * (r - result.mean_error);
  result.ci95_half_width = 1.96 * std::sqrt(sq / (n - 1.0)) / std::sqrt(n);
  return result;
}

double wall_width(const std::vector<Eigen::Vector3d>& points,
                  double trim_fraction) {
  if (!(trim_fraction >= 0.0 && trim_fraction < 0.5))
    throw std::invalid_argument("trim fraction must lie in [0, 0.5)");
  std::vector<double> ys;
  ys.reserve(points.size());
  for (const auto& p : points) ys.push_back(p.y());
  std::sort(ys.begin(), ys.end());
  const auto cut = static_cast<std::size_t>(
      std::floor(trim_fraction * static_cast<double>(ys.size())));
  if (ys.size() <= 2 * cut)
    throw std::invalid_argument("no points left after trimming");
  return ys[ys.size() - 1 - cut] - ys[cut];
}

namespace {

// Nearest neighbor by an x-sorted sweep with pruning on |dx|.
class SortedCloud {
 public:
  explicit SortedCloud(const std::vector<Eigen::Vector3d>& cloud)
      : cloud_(cloud), order_(cloud.size()) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return cloud_[a].x() < cloud_[b].x() ||
             (cloud_[a].x() == cloud_[b].x() && a < b);
    });
    xs_.reserve(order_.size());
    for (std::size_t i : order_) xs_.push_back(cloud_[i].x());
  }

  std::size_t nearest(const Eigen::Vector3d& q) const {
    const auto start =
        std::lower_bound(xs_.begin(), xs_.end(), q.x()) - xs_.begin();
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = order_.front();
    auto visit = [&](std::ptrdiff_t k) {
      const std::size_t idx = order_[k];
      const double d2 = (cloud_[idx] - q).squaredNorm();
      if (d2 < best || (d2 == best && idx < best_idx)) {
        best = d2;
        best_idx = idx;
      }
    };
    const auto n = static_cast<std::ptrdiff_t>(xs_.size());
    for (std::ptrdiff_t k = start; k < n; ++k) {
      const double dx = xs_[k] - q.x();
      if (dx * dx > best) break;
      visit(k);
    }
    for (std::ptrdiff_t k = start - 1; k >= 0; --k) {
      const double dx = q.x() - xs_[k];
      if (dx * dx > best) break;
      visit(k);
    }
    return best_idx;
  }

 private:
  const std::vector<Eigen::Vector3d>& cloud_;
  std::vector<std::size_t> order_;
  std::vector<double> xs_;
};

double cosine(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double denom = a.norm() * b.norm();
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (a == b) return 1.0;
  return std::clamp(a.dot(b) / denom, -1.0, 1.0);
}

}  // namespace

double mean_pairwise_cosine(const std::vector<Eigen::Vector3d>& cloud_a,
                            const std::vector<Eigen::Vector3d>& cloud_b,
                            CorrespondenceMode mode) {
  if (cloud_a.empty() || cloud_b.empty())
    throw std::invalid_argument("empty cloud");
  double sum = 0.0;
  std::size_t used = 0;
  auto add = [&](double c) {
    if (std::isnan(c)) return;  // zero vector, no direction
    sum += c;
    ++used;
  };
  if (mode == CorrespondenceMode::kOrdered) {
    if (cloud_a.size() != cloud_b.size())
      throw std::invalid_argument("ordered correspondence needs equal sizes");
    for (std::size_t i = 0; i < cloud_a.size(); ++i)
      add(cosine(cloud_a[i], cloud_b[i]));
  } else {
    const SortedCloud index(cloud_b);
    for (const auto& p : cloud_a) add(cosine(p, cloud_b[index.nearest(p)]));
  }
  if (used == 0) throw std::invalid_argument("no usable correspondences");
  return sum / static_cast<double>(used);
}

double silverman_bandwidth(const std::vector<double>& values) {
  if (values.size() < 2) throw std::invalid_argument("need at least 2 values");
  const auto n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  const double sd = std::sqrt(sq / (n - 1.0));
  if (!(sd > 0.0)) throw std::domain_error("zero variance");

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {  // linear interpolation
    const double pos = q * (n - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(n, -0.2);
}

Kde kde_1d(const std::vector<double>& values, int bin_count,
           std::optional<double> bandwidth,
           std::optional<std::pair<double, double>> range) {
  if (values.size() < 2) throw std::invalid_argument("need at least 2 values");
  if (bin_count < 1) throw std::invalid_argument("bin_count must be positive");

  Kde kde;
  kde.bandwidth = (bandwidth && *bandwidth > 0.0) ? *bandwidth
                                                  : silverman_bandwidth(values);
  double lo, hi;
  if (range) {
    std::tie(lo, hi) = *range;
  } else {
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    lo = *mn;
    hi = *mx;
  }
  if (!(hi > lo)) {
    lo -= 3.0 * kde.bandwidth;
    hi += 3.0 * kde.bandwidth;
  }
  kde.bin_width = (hi - lo) / bin_count;
  kde.centers.resize(bin_count);
  kde.densities.assign(bin_count, 0.0);
  const double inv_h = 1.0 / kde.bandwidth;
  for (int i = 0; i < bin_count; ++i) {
    const double c = lo + (i + 0.5) * kde.bin_width;
    kde.centers[i] = c;
    double acc = 0.0;
    for (double v : values) {
      const double u = (c - v) * inv_h;
      acc += std::exp(-0.5 * u * u);
    }
    kde.densities[i] = acc;
  }
  const double mass =
      std::accumulate(kde.densities.begin(), kde.densities.end(), 0.0) *
      kde.bin_width;
  if (!(mass > 0.0)) throw std::domain_error("KDE has no mass on the bins");
  for (double& d : kde.densities) d /= mass;
  return kde;
}

double hellinger(const std::vector<double>& p, const std::vector<double>& q,
                 double bin_width) {
  if (p.size() != q.size() || p.empty())
    throw std::invalid_argument("densities must share the same bins");
  double bc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) bc += std::sqrt(p[i] * q[i]);
  bc *= bin_width;
  return std::sqrt(std::clamp(1.0 - bc, 0.0, 1.0));
}

DistributionComparison compare_distributions(
    const std::vector<Eigen::Vector3d>& cloud_a,
    const std::vector<Eigen::Vector3d>& cloud_b,
    const DistributionConfig& cfg) {
  DistributionComparison out;
  out.wall_width_a = wall_width(cloud_a, cfg.trim_fraction);
  out.wall_width_b = wall_width(cloud_b, cfg.trim_fraction);
  out.width_diff = out.wall_width_a - out.wall_width_b;
  out.mean_cosine = mean_pairwise_cosine(cloud_a, cloud_b, cfg.cosine_mode);

  std::vector<double> xa, xb;
  for (const auto& p : cloud_a) xa.push_back(p.x());
  for (const auto& p : cloud_b) xb.push_back(p.x());
  const double lo = std::min(*std::min_element(xa.begin(), xa.end()),
                             *std::min_element(xb.begin(), xb.end()));
  const double hi = std::max(*std::max_element(xa.begin(), xa.end()),
                             *std::max_element(xb.begin(), xb.end()));
  out.kde_a = kde_1d(xa, cfg.kde_bins, cfg.bandwidth, std::pair(lo, hi));
  out.kde_b = kde_1d(xb, cfg.kde_bins, cfg.bandwidth, std::pair(lo, hi));
  out.hellinger = hellinger(out.kde_a.densities, out.kde_b.densities,
                            out.kde_a.bin_width);
  return out;
}

}  // namespace seasky
