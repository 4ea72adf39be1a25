#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace ihho;

TEST(Gini, HandValues) {
  const std::vector<std::size_t> pure{10, 0}, half{5, 5}, third{1, 2};
  EXPECT_DOUBLE_EQ(gini(pure), 0.0);
  EXPECT_DOUBLE_EQ(gini(half), 0.5);
  EXPECT_NEAR(gini(third), 1.0 - 1.0 / 9 - 4.0 / 9, 1e-15);
}

TEST(Forest, SeparableDataGivesStumps) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 20; ++i) {
    const double x = i < 10 ? -1.0 - i : 1.0 + (i - 10);
    rows.push_back({x});
    labels.push_back(x > 0 ? 1 : 0);
  }
  const auto d = fx::make_dataset(rows, labels);
  const auto model = train_forest(d, {.n_trees = 10}, RngStream(1, 2));
  for (const auto& t : model.trees) {
    EXPECT_EQ(t.depth(), 1u);
    EXPECT_GT(t.nodes[0].threshold, -10.0);
    EXPECT_LT(t.nodes[0].threshold, 10.0);
  }
  EXPECT_EQ(model.predict(d.features), d.labels);
  EXPECT_EQ(model.importances, (std::vector<double>{1.0}));
}

TEST(Forest, MFeaturesAboveP) {
  const auto d = fx::blobs(10, 10, 2, 1.0, 1);
  try {
    train_forest(d, {.n_trees = 2, .m_features = 3}, RngStream(1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}

TEST(Forest, IdenticalRowsAreDegenerate) {
  const auto d = fx::make_dataset({{1, 1}, {1, 1}, {1, 1}}, {0, 1, 0});
  try {
    train_forest(d, {}, RngStream(1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateData);
  }
}

TEST(Forest, DeterministicAndThreadIndependent) {
  const auto d = fx::blobs(60, 20, 5, 1.5, 7);
  const auto a = train_forest(d, {.n_trees = 30}, RngStream(4, 4), 1);
  const auto b = train_forest(d, {.n_trees = 30}, RngStream(4, 4), 1);
  const auto c = train_forest(d, {.n_trees = 30}, RngStream(4, 4), 4);
  EXPECT_EQ(a.importances, b.importances);
  EXPECT_EQ(a.importances, c.importances);
}

TEST(Forest, ImportancesNonnegativeAndNormalized) {
  const auto d = fx::blobs(80, 20, 6, 1.0, 8);
  const auto m = train_forest(d, {.n_trees = 20}, RngStream(2, 2));
  double sum = 0;
  for (double v : m.importances) {
    EXPECT_GE(v, 0.0);
    sum += v;
  }
  EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(Forest, LeafCountsSumToBootstrapAndGainsNonnegative) {
  const auto d = fx::blobs(50, 15, 3, 1.0, 9);
  const auto m = train_forest(d, {.n_trees = 10, .min_leaf = 2}, RngStream(3, 3));
  for (const auto& t : m.trees) {
    std::size_t leaves = 0;
    for (const auto& n : t.nodes) {
      if (n.is_leaf()) {
        leaves += n.n_samples;
        EXPECT_GE(n.n_samples, 2u);
      } else {
        EXPECT_GE(n.weighted_gain, 0.0);
      }
    }
    EXPECT_EQ(leaves, d.size());
  }
}

TEST(Forest, MaxDepthRespected) {
  const auto d = fx::blobs(100, 30, 4, 0.5, 10);
  const auto m = train_forest(d, {.n_trees = 5, .max_depth = 2}, RngStream(1, 1));
  for (const auto& t : m.trees) EXPECT_LE(t.depth(), 2u);
}

TEST(Forest, OnlySplitFeatureGetsAllImportance) {
  // feature 3 separates the classes, the others are constant
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) {
    rows.push_back({1, 2, 3, static_cast<double>(i), 5});
    labels.push_back(i < 12 ? 1 : 0);
  }
  const auto m = train_forest(fx::make_dataset(rows, labels), {.n_trees = 5}, RngStream(1, 1));
  EXPECT_EQ(m.importances, (std::vector<double>{0, 0, 0, 1, 0}));
}

TEST(Forest, InformativeBeatsNoiseFeature) {
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RngStream g(seed, 500);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 50; ++i) {
      const int y = i < 25 ? 0 : 1;
      rows.push_back({g.normal() + 2.0 * y, g.normal()});
      labels.push_back(y);
    }
    const auto m = train_forest(fx::make_dataset(rows, labels), {.n_trees = 25}, RngStream(seed, 1));
    wins += m.importances[0] > m.importances[1] ? 1 : 0;
  }
  EXPECT_GE(wins, 95);
}

TEST(Forest, ImportancesPermuteWithFeatures) {
  const auto d = fx::blobs(150, 50, 3, 1.0, 11);
  // every feature is tried at every node, so only the column labels differ
  const ForestParams params{.n_trees = 10, .m_features = 3};
  const auto base = train_forest(d, params, RngStream(5, 5)).importances;
  const std::vector<std::size_t> perm{2, 0, 1};
  const auto permuted = train_forest(select_columns(d, perm), params, RngStream(5, 5)).importances;
  for (std::size_t j = 0; j < perm.size(); ++j) EXPECT_NEAR(permuted[j], base[perm[j]], 1e-9);
}

TEST(Forest, TreeInvariantToRowOrder) {
  const auto d = fx::blobs(40, 20, 3, 1.0, 12);
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::reverse(order.begin(), order.end());
  const auto shuffled = subset(d, order);
  RngStream g(1, 1);
  std::vector<std::size_t> sample(d.size()), remapped(d.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    sample[i] = g.below(d.size());
    remapped[i] = d.size() - 1 - sample[i];
  }
  const auto a = train_tree(d, sample, {}, RngStream(9, 9));
  const auto b = train_tree(shuffled, remapped, {}, RngStream(9, 9));
  ASSERT_EQ(a.nodes.size(), b.nodes.size());
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    EXPECT_EQ(a.nodes[i].feature, b.nodes[i].feature);
    EXPECT_EQ(a.nodes[i].threshold, b.nodes[i].threshold);
    EXPECT_EQ(a.nodes[i].n_samples, b.nodes[i].n_samples);
  }
}

TEST(SelectTop, Examples) {
  const std::vector<double> a{0.2, 0.5, 0.3};
  EXPECT_EQ(top_feature_indices(a, 1), (std::vector<std::size_t>{1}));
  EXPECT_EQ(top_feature_indices(a, 3), (std::vector<std::size_t>{1, 2, 0}));
  const std::vector<double> tie{0.4, 0.4, 0.2};
  EXPECT_EQ(top_feature_indices(tie, 2), (std::vector<std::size_t>{0, 1}));
  for (std::size_t bad : {std::size_t{0}, std::size_t{4}}) {
    try {
      top_feature_indices(a, bad);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::BadFn);
    }
  }
  const auto d = fx::make_dataset({{1, 2, 3}, {4, 5, 6}}, {0, 1});
  const auto s = select_top_features(d, a, 2);
  EXPECT_EQ(s.feature_names, (std::vector<std::string>{"f1", "f2"}));
  EXPECT_EQ(s.features(1, 0), 5.0);
}
