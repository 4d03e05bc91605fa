#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace seasky {

struct AlignmentResult {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  std::vector<double> residuals;
  double mean_error = 0.0;
  // Normal approximation, 1.96 * sample std / sqrt(n).
  double ci95_half_width = 0.0;
};

// Least-squares rotation + translation mapping source onto target (ordered
// correspondences). Throws std::invalid_argument for fewer than 3 points,
// unequal counts or a collinear source set.
AlignmentResult rigid_align(const std::vector<Eigen::Vector3d>& source,
                            const std::vector<Eigen::Vector3d>& target);

// Width of the y spread after dropping trim_fraction of the lowest and of the
// highest values. Throws std::invalid_argument when nothing is left.
double wall_width(const std::vector<Eigen::Vector3d>& points,
                  double trim_fraction = 0.05);

enum class CorrespondenceMode { kNearestNeighbor, kOrdered };

// Mean cosine of the angle between the position vectors of corresponding
// points. Nearest-neighbor mode pairs every point of a with its closest point
// in b. Throws std::invalid_argument for an empty cloud (or unequal sizes in
// ordered mode).
double mean_pairwise_cosine(
    const std::vector<Eigen::Vector3d>& cloud_a,
    const std::vector<Eigen::Vector3d>& cloud_b,
    CorrespondenceMode mode = CorrespondenceMode::kNearestNeighbor);

struct Kde {
  std::vector<double> centers;
  std::vector<double> densities;
  double bin_width = 0.0;
  double bandwidth = 0.0;
};

// Silverman's rule of thumb: 0.9 min(sd, IQR / 1.34) n^(-1/5). Throws
// std::domain_error("zero variance") when every value is identical.
double silverman_bandwidth(const std::vector<double>& values);

// Gaussian KDE evaluated at bin_count centers over [lo, hi] (the data range
// when not given), normalized so that sum(density) * bin_width = 1.
// A non-positive or missing bandwidth selects Silverman's rule.
Kde kde_1d(const std::vector<double>& values, int bin_count,
           std::optional<double> bandwidth = std::nullopt,
           std::optional<std::pair<double, double>> range = std::nullopt);

// sqrt(1 - sum sqrt(p q) * bin_width), clamped to [0, 1]. Throws
// std::invalid_argument for mismatched bin counts.
double hellinger(const std::vector<double>& p, const std::vector<double>& q,
                 double bin_width);

struct DistributionConfig {
  double trim_fraction = 0.05;
  int kde_bins = 100;
  std::optional<double> bandwidth;  // Silverman when unset
  CorrespondenceMode cosine_mode = CorrespondenceMode::kNearestNeighbor;
};

struct DistributionComparison {
  double wall_width_a = 0.0;
  double wall_width_b = 0.0;
  double width_diff = 0.0;  // a - b
  double mean_cosine = 0.0;
  double hellinger = 0.0;
  Kde kde_a;
  Kde kde_b;
};

// Both clouds in a wall-aligned frame (wall along x, z up). KDEs are built
// over x on the union of both ranges.
DistributionComparison compare_distributions(
    const std::vector<Eigen::Vector3d>& cloud_a,
    const std::vector<Eigen::Vector3d>& cloud_b,
    const DistributionConfig& cfg = {});

}  // namespace seasky
