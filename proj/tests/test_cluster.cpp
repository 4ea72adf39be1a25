#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ihho;

namespace {

Matrix column(std::initializer_list<double> xs) {
  Matrix m;
  for (double x : xs) m.append_row(std::vector<double>{x});
  return m;
}

// 10 majority rows in a tight group far away, 5 minority core rows, one
// minority border row, two minority noise rows.
Dataset cleanse_fixture(bool majority_outlier = false) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 10; ++i) {
    rows.push_back({20.0 + 0.1 * i, 20.0});
    labels.push_back(0);
  }
  for (auto r : std::vector<std::vector<double>>{{0, 0}, {0.1, 0}, {0, 0.1}, {0.1, 0.1}, {0.05, 0.05}}) {
    rows.push_back(r);
    labels.push_back(1);
  }
  rows.push_back({1.05, 0});
  labels.push_back(1);
  rows.push_back({-10, 5});
  labels.push_back(1);
  rows.push_back({5, -10});
  labels.push_back(1);
  if (majority_outlier) {
    rows.push_back({50, 50});
    labels.push_back(0);
  }
  return fx::make_dataset(rows, labels);
}

const DbscanParams kFixtureParams{1.0, 4};

}  // namespace

TEST(Dbscan, OneDimensionalExample) {
  const auto labels = dbscan(column({0, 1, 2, 10, 11, 12, 100}), {1.5, 3});
  const std::vector<PointKind> kinds{PointKind::Border, PointKind::Core, PointKind::Border, PointKind::Border,
                                     PointKind::Core,   PointKind::Border, PointKind::Noise};
  for (std::size_t i = 0; i < kinds.size(); ++i) EXPECT_EQ(labels[i].kind, kinds[i]) << i;
  EXPECT_EQ(labels[0].cluster, 0u);
  EXPECT_EQ(labels[2].cluster, 0u);
  EXPECT_EQ(labels[3].cluster, 1u);
  EXPECT_EQ(labels[5].cluster, 1u);
  EXPECT_FALSE(labels[6].cluster);
}

TEST(Dbscan, SinglePointIsItsOwnCore) {
  const auto labels = dbscan(column({3}), {0.5, 1});
  ASSERT_EQ(labels.size(), 1u);
  EXPECT_EQ(labels[0], (PointLabel{PointKind::Core, 0}));
}

TEST(Dbscan, EmptyInput) { EXPECT_TRUE(dbscan(Matrix{}, {1.0, 3}).empty()); }

TEST(Dbscan, MatchesReferenceOnRandomSets) {
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    RngStream g(trial, 77);
    const std::size_t n = 5 + g.below(40);
    Matrix pts;
    for (std::size_t i = 0; i < n; ++i) pts.append_row(std::vector<double>{g.uniform() * 4, g.uniform() * 4});
    const double eps = 0.2 + g.uniform();
    const std::size_t min_pts = 1 + g.below(6);
    ASSERT_EQ(dbscan(pts, {eps, min_pts}), oracle::dbscan(pts, eps, min_pts)) << "trial " << trial;
  }
}

TEST(Dbscan, LargerEpsilonNeverShrinksCores) {
  RngStream g(3, 3);
  Matrix pts;
  for (int i = 0; i < 80; ++i) pts.append_row(std::vector<double>{g.normal(), g.normal()});
  auto prev = dbscan(pts, {0.1, 4});
  for (double eps = 0.2; eps < 2.0; eps += 0.1) {
    const auto cur = dbscan(pts, {eps, 4});
    for (std::size_t i = 0; i < cur.size(); ++i) {
      if (prev[i].kind == PointKind::Core) {
        EXPECT_EQ(cur[i].kind, PointKind::Core);
      }
      if (cur[i].kind == PointKind::Noise) {
        EXPECT_EQ(prev[i].kind, PointKind::Noise);
      }
    }
    prev = cur;
  }
}

TEST(Dbscan, RejectsBadParams) {
  EXPECT_THROW(dbscan(column({1, 2}), {0.0, 3}), Error);
  EXPECT_THROW(dbscan(column({1, 2}), {1.0, 0}), Error);
}

TEST(AutoParams, MedianKDistance) {
  // five points on a line spaced 1 apart, min_pts 2: 2nd-nearest distances are 2,1,1,1,2
  const auto p = auto_dbscan_params(column({0, 1, 2, 3, 4}), std::nullopt, 2);
  EXPECT_EQ(p.min_pts, 2u);
  EXPECT_DOUBLE_EQ(p.epsilon, 1.0);
  EXPECT_EQ(auto_dbscan_params(column({0, 1, 2}), 0.7).epsilon, 0.7);
  EXPECT_EQ(auto_dbscan_params(column({0, 1, 2})).min_pts, 4u);
}

TEST(Cleanse, FixtureLabelsAsConstructed) {
  const auto d = cleanse_fixture();
  const auto labels = dbscan(d.features, kFixtureParams);
  for (std::size_t i = 10; i < 15; ++i) EXPECT_EQ(labels[i].kind, PointKind::Core);
  EXPECT_EQ(labels[15].kind, PointKind::Border);
  EXPECT_EQ(labels[16].kind, PointKind::Noise);
  EXPECT_EQ(labels[17].kind, PointKind::Noise);
}

TEST(Cleanse, RemovesNoiseAndBorderMinority) {
  const auto d = cleanse_fixture();
  const auto labels = dbscan(d.features, kFixtureParams);
  const auto r = cleanse_minority(d, labels, {.remove_border = true, .min_keep = 5});
  EXPECT_EQ(r.removed, (std::vector<std::size_t>{15, 16, 17}));
  EXPECT_EQ(r.dataset.class_counts(), (std::vector<std::size_t>{10, 5}));
  EXPECT_EQ(r.restored, 0u);
}

TEST(Cleanse, DefaultMinKeepRestoresBorderFirst) {
  const auto d = cleanse_fixture();
  const auto r = cleanse_minority(d, dbscan(d.features, kFixtureParams), {});
  EXPECT_EQ(r.removed, (std::vector<std::size_t>{16, 17}));
  EXPECT_EQ(r.dataset.class_counts(), (std::vector<std::size_t>{10, 6}));
  EXPECT_EQ(r.restored, 1u);
}

TEST(Cleanse, KeepBorderWhenAsked) {
  const auto d = cleanse_fixture();
  const auto r = cleanse_minority(d, dbscan(d.features, kFixtureParams), {.remove_border = false, .min_keep = 5});
  EXPECT_EQ(r.removed, (std::vector<std::size_t>{16, 17}));
}

TEST(Cleanse, AllCoreUnchanged) {
  auto d = cleanse_fixture();
  d = subset(d, std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14});
  const auto r = cleanse_minority(d, dbscan(d.features, kFixtureParams), {.min_keep = 5});
  EXPECT_TRUE(r.removed.empty());
  EXPECT_EQ(r.dataset.size(), d.size());
  EXPECT_EQ(r.dataset.row_ids, d.row_ids);
}

TEST(Cleanse, MajorityNoiseRetained) {
  const auto d = cleanse_fixture(true);
  const auto labels = dbscan(d.features, kFixtureParams);
  ASSERT_EQ(labels[18].kind, PointKind::Noise);
  const auto r = cleanse_minority(d, labels, {.min_keep = 5});
  EXPECT_EQ(std::ranges::count(r.removed, 18u), 0);
  EXPECT_EQ(r.dataset.class_counts()[0], 11u);
}

TEST(Cleanse, TooFewMinorityToKeep) {
  const auto d = cleanse_fixture();
  try {
    cleanse_minority(d, dbscan(d.features, kFixtureParams), {.min_keep = 9});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MinorityCollapsed);
  }
}

TEST(Cleanse, TwoMoonsOutliersAreTheNoise) {
  const auto d = fx::two_moons_with_outliers();
  const auto labels = dbscan(d.features, {0.35, 3});
  const auto r = cleanse_minority(d, labels, {.remove_border = false});
  EXPECT_EQ(r.removed, (std::vector<std::size_t>{220, 221, 222}));
}
