#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

namespace seasky::oracle {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / (n - 1);
  if (n > 1) out.back() = b;
  return out;
}

double lower_quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  return values[static_cast<std::size_t>(std::floor(q * (values.size() - 1)))];
}

double otsu_exhaustive(const std::vector<double>& values) {
  std::vector<double> distinct = values;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  double best = -1.0, best_t = distinct.front();
  for (std::size_t k = 0; k + 1 < distinct.size(); ++k) {
    const double t = distinct[k];
    double n0 = 0, n1 = 0, s0 = 0, s1 = 0;
    for (double v : values) {
      if (v <= t) {
        n0 += 1;
        s0 += v;
      } else {
        n1 += 1;
        s1 += v;
      }
    }
    const double n = n0 + n1;
    const double m0 = s0 / n0, m1 = s1 / n1;
    const double between = (n0 / n) * (n1 / n) * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return best_t;
}

namespace {

std::vector<double> gather(const PolarSonarImage& img, int r, int c,
                           KernelSize k) {
  std::vector<double> w;
  for (int dr = -k.rows / 2; dr <= k.rows / 2; ++dr)
    for (int dc = -k.cols / 2; dc <= k.cols / 2; ++dc)
      w.push_back(img.at(std::clamp(r + dr, 0, img.rows() - 1),
                         std::clamp(c + dc, 0, img.cols() - 1)));
  return w;
}

template <typename Fn>
std::vector<double> window_apply(const PolarSonarImage& img, KernelSize k,
                                 Fn fn) {
  std::vector<double> out;
  for (int r = 0; r < img.rows(); ++r)
    for (int c = 0; c < img.cols(); ++c) out.push_back(fn(gather(img, r, c, k)));
  return out;
}

}  // namespace

std::vector<double> window_min(const PolarSonarImage& img, KernelSize k) {
  return window_apply(img, k, [](std::vector<double> w) {
    return *std::min_element(w.begin(), w.end());
  });
}

std::vector<double> window_max(const PolarSonarImage& img, KernelSize k) {
  return window_apply(img, k, [](std::vector<double> w) {
    return *std::max_element(w.begin(), w.end());
  });
}

std::vector<double> window_median(const PolarSonarImage& img, KernelSize k) {
  return window_apply(img, k, [](std::vector<double> w) {
    std::sort(w.begin(), w.end());
    return w[w.size() / 2];
  });
}

std::vector<PolarIndex> soca_cfar(const PolarSonarImage& img,
                                  const CfarConfig& cfg) {
  const int n = img.rows();
  const int ref = cfg.reference_cells, guard = cfg.guard_cells;
  const double alpha =
      ref * (std::pow(cfg.pfa, -1.0 / static_cast<double>(ref)) - 1.0);
  std::vector<PolarIndex> out;
  for (int c = 0; c < img.cols(); ++c) {
    for (int r = 0; r < n; ++r) {
      double lead = 0, lag = 0;
      int n_lead = 0, n_lag = 0;
      for (int k = r - guard - ref; k <= r - guard - 1; ++k) {
        if (k < 0) continue;
        lead += img.at(k, c);
        ++n_lead;
      }
      for (int k = r + guard + 1; k <= r + guard + ref; ++k) {
        if (k >= n) continue;
        lag += img.at(k, c);
        ++n_lag;
      }
      const bool full_lead = n_lead == ref, full_lag = n_lag == ref;
      double noise;
      if (full_lead && full_lag) {
        noise = std::min(lead / ref, lag / ref);
      } else if (full_lead) {
        noise = lead / ref;
      } else {
        noise = lag / ref;
      }
      const double v = img.at(r, c);
      if (v >= cfg.min_intensity && v > alpha * noise) out.push_back({r, c});
    }
  }
  return out;
}

std::vector<int> dbscan(const std::vector<FeaturePoint>& points,
                        double epsilon, int min_samples) {
  const std::size_t n = points.size();
  auto d2 = [&](std::size_t i, std::size_t j) {
    const double dx = points[i].x - points[j].x;
    const double dy = points[i].y - points[j].y;
    const double dz = points[i].z - points[j].z;
    return dx * dx + dy * dy + dz * dz;
  };
  const double eps2 = epsilon * epsilon;
  std::vector<std::vector<char>> adj(n, std::vector<char>(n));
  std::vector<char> core(n);
  for (std::size_t i = 0; i < n; ++i) {
    int count = 0;
    for (std::size_t j = 0; j < n; ++j) {
      adj[i][j] = d2(i, j) <= eps2;
      count += adj[i][j];
    }
    core[i] = count >= min_samples;
  }
  // Warshall closure over the core-core graph.
  std::vector<std::vector<char>> reach(n, std::vector<char>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      reach[i][j] = core[i] && core[j] && (adj[i][j] || i == j);
  for (std::size_t k = 0; k < n; ++k) {
    if (!core[k]) continue;
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (reach[k][j]) reach[i][j] = 1;
    }
  }
  std::vector<int> labels(n, kNoise);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i] || labels[i] != kNoise) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (reach[i][j]) labels[j] = next;
    ++next;
  }
  auto coords = [&](std::size_t i) {
    return std::tuple(points[i].x, points[i].y, points[i].z);
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    std::size_t best = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (!core[j] || !adj[i][j]) continue;
      if (best == n || d2(i, j) < d2(i, best) ||
          (d2(i, j) == d2(i, best) && coords(j) < coords(best)))
        best = j;
    }
    if (best < n) labels[i] = labels[best];
  }
  return labels;
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] == kNoise) != (b[i] == kNoise)) return false;
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (a[i] == kNoise || a[j] == kNoise) continue;
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
    }
  }
  return true;
}

double exhaustive_assignment_cost(const Eigen::MatrixXd& cost) {
  const bool transpose = cost.rows() > cost.cols();
  const Eigen::MatrixXd c = transpose ? Eigen::MatrixXd(cost.transpose()) : cost;
  const int rows = static_cast<int>(c.rows());
  const int cols = static_cast<int>(c.cols());
  if (rows == 0) return 0.0;
  std::vector<int> perm(cols);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < rows; ++i) total += c(i, perm[i]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double greedy_assignment_cost(const Eigen::MatrixXd& cost) {
  std::vector<char> row_used(cost.rows()), col_used(cost.cols());
  const auto k = std::min(cost.rows(), cost.cols());
  double total = 0.0;
  for (Eigen::Index step = 0; step < k; ++step) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index bi = 0, bj = 0;
    for (Eigen::Index i = 0; i < cost.rows(); ++i)
      for (Eigen::Index j = 0; j < cost.cols(); ++j)
        if (!row_used[i] && !col_used[j] && cost(i, j) < best) {
          best = cost(i, j);
          bi = i;
          bj = j;
        }
    row_used[bi] = col_used[bj] = 1;
    total += best;
  }
  return total;
}

Eigen::Vector3d padded_window_means(const PolarSonarImage& img, PolarIndex at,
                                    double step) {
  const auto& in = img.intrinsics();
  const double gamma = img.at(at.range_bin, at.column);
  const double dr = (in.max_range - in.min_range) / in.num_range_bins;
  const double db = (in.bearing_max - in.bearing_min) / (in.num_beams - 1);
  const double r = in.min_range + (at.range_bin + 0.5) * dr;
  const double b = in.bearing_min + at.column * db;
  const double cx = r * std::cos(b), cy = r * std::sin(b);
  auto lookup = [&](double x, double y) {
    const double rr = std::sqrt(x * x + y * y);
    const double bb = std::atan2(y, x);
    if (rr < in.min_range || rr > in.max_range || bb < in.bearing_min ||
        bb > in.bearing_max)
      return gamma;
    int bin = static_cast<int>((rr - in.min_range) / dr);
    bin = std::min(bin, in.num_range_bins - 1);
    const int col = static_cast<int>(std::floor((bb - in.bearing_min) / db + 0.5));
    return img.at(bin, std::clamp(col, 0, in.num_beams - 1));
  };
  const double s = step * dr;
  return {gamma, (lookup(cx - s, cy) + gamma + lookup(cx + s, cy)) / 3.0,
          (lookup(cx, cy - s) + gamma + lookup(cx, cy + s)) / 3.0};
}

Eigen::Vector3d rotation_log(const Eigen::Matrix3d& r) {
  const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double theta = std::acos(c);
  const Eigen::Vector3d v(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  if (theta < 1e-12) return 0.5 * v;
  if (kPi - theta < 1e-6) {
    // Near pi: axis from the symmetric part.
    const Eigen::Matrix3d b = (r + Eigen::Matrix3d::Identity()) / 2.0;
    Eigen::Index k;
    b.diagonal().maxCoeff(&k);
    Eigen::Vector3d axis = b.col(k) / std::sqrt(b(k, k));
    if (axis.dot(v) < 0) axis = -axis;
    return theta * axis.normalized();
  }
  return theta / (2.0 * std::sin(theta)) * v;
}

Eigen::Matrix3d rotation_exp(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  Eigen::Matrix3d k;
  k << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  if (theta < 1e-12) return Eigen::Matrix3d::Identity() + k;
  k /= theta;
  return Eigen::Matrix3d::Identity() + std::sin(theta) * k +
         (1.0 - std::cos(theta)) * k * k;
}

Eigen::Matrix3d geodesic(const Eigen::Matrix3d& r0, const Eigen::Matrix3d& r1,
                         double s) {
  return r0 * rotation_exp(s * rotation_log(r0.transpose() * r1));
}

double ray_plane_distance(const Eigen::Vector3d& origin,
                          const Eigen::Vector3d& dir, const Eigen::Vector3d& n,
                          double d) {
  const double denom = n.dot(dir);
  if (denom == 0.0) return -1.0;
  const double t = (d - n.dot(origin)) / denom;
  return t >= 0.0 ? t * dir.norm() : -1.0;
}

double hellinger_normals_numeric(double mu0, double sd0, double mu1,
                                 double sd1, int steps) {
  const double lo = std::min(mu0 - 12 * sd0, mu1 - 12 * sd1);
  const double hi = std::max(mu0 + 12 * sd0, mu1 + 12 * sd1);
  const double h = (hi - lo) / steps;
  auto pdf = [](double x, double mu, double sd) {
    const double u = (x - mu) / sd;
    return std::exp(-0.5 * u * u) / (sd * std::sqrt(2.0 * kPi));
  };
  double acc = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double x = lo + i * h;
    const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
    acc += w * std::sqrt(pdf(x, mu0, sd0) * pdf(x, mu1, sd1));
  }
  return std::sqrt(std::max(0.0, 1.0 - acc * h));
}

double expected_trimmed_uniform_width(int n, double trim_fraction) {
  // E[U_(k)] = k / (n + 1) for the k-th smallest of n.
  const int cut = static_cast<int>(std::floor(trim_fraction * n));
  return static_cast<double>(n - 2 * cut - 1) / (n + 1);
}

SonarIntrinsics test_intrinsics(int bins, int beams) {
  SonarIntrinsics in;
  in.num_range_bins = bins;
  in.num_beams = beams;
  in.max_range = 10.0;
  in.bearing_min = deg2rad(-30.0);
  in.bearing_max = deg2rad(30.0);
  return in;
}

PolarSonarImage random_image(const SonarIntrinsics& in, std::mt19937_64& rng,
                             double zero_fraction) {
  std::uniform_int_distribution<int> level(0, 255);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> data(static_cast<std::size_t>(in.num_range_bins) *
                           in.num_beams);
  for (double& v : data) v = u(rng) < zero_fraction ? 0.0 : level(rng);
  return PolarSonarImage(in, std::move(data));
}

std::vector<FeaturePoint> random_clusters(std::mt19937_64& rng, int max_points,
                                          double extent) {
  std::uniform_int_distribution<int> count(1, max_points);
  std::uniform_int_distribution<int> blobs(1, 5);
  std::uniform_real_distribution<double> where(0.0, extent);
  std::normal_distribution<double> spread(0.0, 0.08);
  const int n = count(rng);
  const int nb = blobs(rng);
  std::vector<Eigen::Vector3d> centers;
  for (int b = 0; b < nb; ++b)
    centers.emplace_back(where(rng), where(rng), where(rng) * 0.2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, nb - 1);
  std::vector<FeaturePoint> pts;
  for (int i = 0; i < n; ++i) {
    FeaturePoint f;
    f.id = i;
    if (u(rng) < 0.8) {
      const auto& c = centers[pick(rng)];
      f.x = c.x() + spread(rng);
      f.y = c.y() + spread(rng);
      f.z = c.z() + spread(rng);
    } else {
      f.x = where(rng);
      f.y = where(rng);
      f.z = where(rng) * 0.2;
    }
    pts.push_back(f);
  }
  return pts;
}

}  // namespace seasky::oracle
