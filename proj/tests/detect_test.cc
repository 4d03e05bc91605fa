#include <algorithm>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "oracles.h"
#include "seasky/detect.h"

namespace seasky {
namespace {

PolarSonarImage column(std::vector<double> values) {
  const int n = static_cast<int>(values.size());
  return PolarSonarImage(oracle::test_intrinsics(n, 2), [&] {
    std::vector<double> d(2 * n, 0.0);
    for (int r = 0; r < n; ++r) d[2 * r] = values[r];
    return d;
  }());
}

TEST(CfarConfig, AlphaFormula) {
  const CfarConfig cfg = CfarConfig::horizontal_default();
  EXPECT_NEAR(cfg.alpha(), 16.0 * (std::pow(0.2, -1.0 / 16.0) - 1.0), 1e-15);
  EXPECT_EQ(CfarConfig::vertical_default().reference_cells, 24);
  EXPECT_EQ(CfarConfig::vertical_default().min_intensity, 130.0);
}

TEST(SocaCfar, FlatZeroColumnHasNoDetections) {
  EXPECT_TRUE(soca_cfar(column(std::vector<double>(64, 0.0)),
                        CfarConfig::horizontal_default())
                  .empty());
}

TEST(SocaCfar, SpikeDetectedAndWeakSpikeGated) {
  std::vector<double> v(64, 0.0);
  v[32] = 200.0;
  const auto hits = soca_cfar(column(v), CfarConfig::horizontal_default());
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0], (PolarIndex{32, 0}));
  EXPECT_EQ(hits, oracle::soca_cfar(column(v), CfarConfig::horizontal_default()));
  v[32] = 90.0;
  EXPECT_TRUE(soca_cfar(column(v), CfarConfig::horizontal_default()).empty());
}

TEST(SocaCfar, ColumnWithoutAnyFullWindowIsAnError) {
  EXPECT_THROW(soca_cfar(column(std::vector<double>(47, 0.0)),
                         CfarConfig::horizontal_default()),
               std::invalid_argument);
  EXPECT_NO_THROW(soca_cfar(column(std::vector<double>(64, 0.0)),
                            CfarConfig::vertical_default()));
  EXPECT_NO_THROW(soca_cfar(column(std::vector<double>(48, 0.0)),
                            CfarConfig::horizontal_default()));
}

TEST(SocaCfar, MatchesTwoWindowOracleAndGate) {
  std::mt19937_64 rng(30);
  for (const auto& cfg :
       {CfarConfig::horizontal_default(), CfarConfig::vertical_default()}) {
    for (int trial = 0; trial < 30; ++trial) {
      const auto img =
          oracle::random_image(oracle::test_intrinsics(64, 8), rng, 0.6);
      const auto got = soca_cfar(img, cfg);
      EXPECT_EQ(got, oracle::soca_cfar(img, cfg));
      for (const auto& d : got)
        EXPECT_GE(img.at(d.range_bin, d.column), cfg.min_intensity);
    }
  }
}

FeaturePoint at(double x, double y, double z, int id = 0) {
  FeaturePoint f;
  f.id = id;
  f.x = x;
  f.y = y;
  f.z = z;
  return f;
}

TEST(Dbscan, HandCases) {
  const DbscanConfig cfg;
  EXPECT_TRUE(dbscan({}, cfg).empty());

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 0.05 / std::sqrt(3.0));
  std::vector<FeaturePoint> packed;
  for (int i = 0; i < 25; ++i) packed.push_back(at(u(rng), u(rng), u(rng), i));
  const auto labels = dbscan(packed, cfg);
  EXPECT_TRUE(std::all_of(labels.begin(), labels.end(),
                          [](int l) { return l == 0; }));
  EXPECT_TRUE(oracle::same_partition(labels, oracle::dbscan(packed, 0.2, 20)));

  std::vector<FeaturePoint> sparse;
  for (int i = 0; i < 5; ++i) sparse.push_back(at(2.0 * i, 0, 0, i));
  for (int l : dbscan(sparse, cfg)) EXPECT_EQ(l, kNoise);
}

TEST(Dbscan, NeighborCountIncludesSelf) {
  // Two points within epsilon: with self counted each has 2 neighbors.
  const auto labels = dbscan({at(0, 0, 0), at(0.1, 0, 0)}, {0.2, 2});
  EXPECT_EQ(labels, (std::vector<int>{0, 0}));
}

TEST(Dbscan, MatchesClosureOracle) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = oracle::random_clusters(rng, 200, 2.0);
    EXPECT_TRUE(oracle::same_partition(dbscan(pts, {0.2, 20}),
                                       oracle::dbscan(pts, 0.2, 20)));
    EXPECT_TRUE(oracle::same_partition(dbscan(pts, {0.3, 5}),
                                       oracle::dbscan(pts, 0.3, 5)));
  }
}

TEST(Dbscan, InvariantUnderReordering) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    auto pts = oracle::random_clusters(rng, 200, 2.0);
    const auto base = dbscan(pts, {0.2, 10});
    std::vector<std::size_t> perm(pts.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<FeaturePoint> shuffled;
    for (std::size_t i : perm) shuffled.push_back(pts[i]);
    const auto labels = dbscan(shuffled, {0.2, 10});
    std::vector<int> back(pts.size());
    for (std::size_t k = 0; k < perm.size(); ++k) back[perm[k]] = labels[k];
    EXPECT_TRUE(oracle::same_partition(base, back));
  }
}

TEST(Dbscan, LargerEpsilonNeverAddsNoise) {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = oracle::random_clusters(rng, 200, 2.0);
    auto noise = [&](double eps) {
      const auto l = dbscan(pts, {eps, 10});
      return std::count(l.begin(), l.end(), kNoise);
    };
    EXPECT_GE(noise(0.1), noise(0.2));
    EXPECT_GE(noise(0.2), noise(0.4));
  }
}

TEST(DbscanConfig, Validation) {
  EXPECT_THROW(dbscan({at(0, 0, 0)}, {0.0, 20}), std::invalid_argument);
  EXPECT_THROW(dbscan({at(0, 0, 0)}, {0.2, 0}), std::invalid_argument);
}

}  // namespace
}  // namespace seasky
