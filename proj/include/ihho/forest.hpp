#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "ihho/core.hpp"

namespace ihho {

struct ForestParams {
  std::size_t n_trees = 100;
  /// Features tried per split; 0 selects ceil(sqrt(p)).
  std::size_t m_features = 0;
  /// 0 means unlimited.
  std::size_t max_depth = 0;
  std::size_t min_leaf = 1;
};

struct TreeNode {
  static constexpr std::size_t kLeaf = static_cast<std::size_t>(-1);

  std::size_t feature = kLeaf;
  double threshold = 0.0;
  double impurity = 0.0;
  std::size_t n_samples = 0;
  std::size_t left = 0;
  std::size_t right = 0;
  /// Impurity decrease of this split weighted by n_t / n (0 for leaves).
  double weighted_gain = 0.0;
  std::vector<std::size_t> class_counts;

  bool is_leaf() const noexcept { return feature == kLeaf; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t bootstrap_size = 0;

  const TreeNode& leaf_for(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
    return nodes[i];
  }

  std::size_t depth() const { return depth_from(0); }

 private:
  std::size_t depth_from(std::size_t i) const {
    if (nodes[i].is_leaf()) return 0;
    return 1 + std::max(depth_from(nodes[i].left), depth_from(nodes[i].right));
  }
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  std::size_t num_features = 0;
  std::size_t num_classes = 0;
  std::vector<double> importances;

  /// Majority vote over trees; each tree votes its leaf's majority class
  /// (lowest class id on ties). Vote ties also go to the lowest id.
  std::vector<int> predict(const Matrix& x) const {
    std::vector<int> out(x.rows());
    std::vector<std::size_t> votes(num_classes);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      std::ranges::fill(votes, 0);
      for (const auto& t : trees) {
        const auto& counts = t.leaf_for(x.row(r)).class_counts;
        ++votes[static_cast<std::size_t>(std::ranges::max_element(counts) - counts.begin())];
      }
      out[r] = static_cast<int>(std::ranges::max_element(votes) - votes.begin());
    }
    return out;
  }
};

/// 1 - sum_c (n_c / n)^2.
inline double gini(std::span<const std::size_t> counts) {
  const double n = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
  if (n == 0.0) return 0.0;
  double sum_sq = 0.0;
  for (auto c : counts) sum_sq += (static_cast<double>(c) / n) * (static_cast<double>(c) / n);
  return 1.0 - sum_sq;
}

namespace detail {

struct SplitCandidate {
  std::size_t feature = TreeNode::kLeaf;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const ForestParams& params, std::size_t m_features, RngStream& rng)
      : data_(data), params_(params), m_(m_features), rng_(rng), k_(data.num_classes()) {}

  DecisionTree build(std::vector<std::size_t> sample) {
    tree_.bootstrap_size = sample.size();
    grow(std::move(sample), 0);
    return std::move(tree_);
  }

 private:
  std::vector<std::size_t> counts_of(std::span<const std::size_t> sample) const {
    std::vector<std::size_t> c(k_, 0);
    for (auto i : sample) ++c[static_cast<std::size_t>(data_.labels[i])];
    return c;
  }

  // Best midpoint split on one feature; gain is parent impurity minus the
  // size-weighted child impurity. Ties keep the lowest threshold.
  SplitCandidate best_on(std::size_t f, std::span<const std::size_t> sample, double parent) const {
    std::vector<std::pair<double, int>> vals;
    vals.reserve(sample.size());
    for (auto i : sample) vals.emplace_back(data_.features(i, f), data_.labels[i]);
    std::ranges::sort(vals);
    SplitCandidate best;
    if (vals.front().first == vals.back().first) return best;

    std::vector<std::size_t> left(k_, 0), right = counts_of(sample);
    const double n = static_cast<double>(vals.size());
    const std::size_t min_leaf = std::max<std::size_t>(1, params_.min_leaf);
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
      ++left[static_cast<std::size_t>(vals[i].second)];
      --right[static_cast<std::size_t>(vals[i].second)];
      if (vals[i].first == vals[i + 1].first) continue;
      const std::size_t nl = i + 1;
      if (nl < min_leaf || vals.size() - nl < min_leaf) continue;
      const double child = (static_cast<double>(nl) * gini(left) + (n - static_cast<double>(nl)) * gini(right)) / n;
      const double gain = parent - child;
      if (best.feature == TreeNode::kLeaf || gain > best.gain) {
        best.feature = f;
        best.gain = gain;
        best.threshold = 0.5 * (vals[i].first + vals[i + 1].first);
      }
    }
    return best;
  }

  std::size_t grow(std::vector<std::size_t> sample, std::size_t depth) {
    const std::size_t id = tree_.nodes.size();
    tree_.nodes.emplace_back();
    TreeNode node;
    node.class_counts = counts_of(sample);
    node.n_samples = sample.size();
    node.impurity = gini(node.class_counts);

    const bool depth_ok = params_.max_depth == 0 || depth < params_.max_depth;
    const bool size_ok = sample.size() >= 2 * std::max<std::size_t>(1, params_.min_leaf);
    SplitCandidate best;
    if (node.impurity > 0.0 && depth_ok && size_ok) {
      // Visit features in a fresh random order; stop once m non-constant
      // features have been evaluated.
      std::vector<std::size_t> order(data_.num_features());
      std::iota(order.begin(), order.end(), std::size_t{0});
      shuffle(order, rng_);
      std::size_t evaluated = 0;
      for (std::size_t f : order) {
        if (evaluated == m_) break;
        const auto cand = best_on(f, sample, node.impurity);
        if (cand.feature == TreeNode::kLeaf) continue;
        ++evaluated;
        // Equal gains go to the lower threshold, not the visit order, so
        // importances follow the features under column reordering.
        if (best.feature == TreeNode::kLeaf || cand.gain > best.gain ||
            (cand.gain == best.gain && cand.threshold < best.threshold)) {
          best = cand;
        }
      }
    }

    if (best.feature == TreeNode::kLeaf || best.gain <= 0.0) {
      tree_.nodes[id] = std::move(node);
      return id;
    }

    std::vector<std::size_t> left, right;
    for (auto i : sample) (data_.features(i, best.feature) <= best.threshold ? left : right).push_back(i);
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.weighted_gain = static_cast<double>(sample.size()) / static_cast<double>(tree_.bootstrap_size) * best.gain;
    sample.clear();
    sample.shrink_to_fit();
    node.left = grow(std::move(left), depth + 1);
    node.right = grow(std::move(right), depth + 1);
    tree_.nodes[id] = std::move(node);
    return id;
  }

  const Dataset& data_;
  const ForestParams& params_;
  std::size_t m_;
  RngStream& rng_;
  std::size_t k_;
  DecisionTree tree_;
};

}  // namespace detail

inline std::size_t resolve_m_features(const ForestParams& params, std::size_t p) {
  const std::size_t m = params.m_features == 0
                            ? static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(p))))
                            : params.m_features;
  require(m >= 1 && m <= p, "m_features must lie in [1, p]");
  return m;
}

/// Grows one tree on `sample`, a list of row positions in `train` (repeats
/// allowed). The tree depends only on the multiset of (row values, label)
/// the positions select and on `rng`, so permuting rows and remapping the
/// positions accordingly yields the same tree.
inline DecisionTree train_tree(const Dataset& train, std::vector<std::size_t> sample, const ForestParams& params,
                               RngStream rng) {
  require(!sample.empty(), "tree needs a non-empty sample");
  detail::TreeBuilder builder(train, params, resolve_m_features(params, train.num_features()), rng);
  return builder.build(std::move(sample));
}

/// Mean decrease in impurity summed over every split on each feature,
/// normalized to sum 1. A forest with no splits at all reports uniform
/// importances.
inline std::vector<double> feature_importance(const ForestModel& model) {
  std::vector<double> imp(model.num_features, 0.0);
  for (const auto& t : model.trees) {
    for (const auto& n : t.nodes) {
      if (!n.is_leaf()) imp[n.feature] += n.weighted_gain;
    }
  }
  const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
  for (auto& v : imp) v = total > 0.0 ? v / total : 1.0 / static_cast<double>(imp.size());
  return imp;
}

/// Tree t draws its bootstrap (n positions, uniform with replacement) and its
/// per-node feature orders from rng.child(t), so trees can be grown in any
/// order or concurrently.
inline ForestModel train_forest(const Dataset& train, const ForestParams& params, RngStream rng,
                                std::size_t threads = 1) {
  require(train.size() >= 2, "forest training needs at least two rows");
  require(params.n_trees >= 1, "n_trees must be at least 1");
  resolve_m_features(params, train.num_features());
  const auto counts = train.class_counts();
  require(std::ranges::count_if(counts, [](std::size_t c) { return c > 0; }) >= 2,
          "forest training needs at least two classes present");
  bool all_same = true;
  for (std::size_t r = 1; r < train.size() && all_same; ++r) {
    all_same = std::ranges::equal(train.features.row(r), train.features.row(0));
  }
  if (all_same) throw Error(ErrorKind::DegenerateData, "all rows have identical feature values");

  ForestModel model;
  model.num_features = train.num_features();
  model.num_classes = train.num_classes();
  model.trees.resize(params.n_trees);
  parallel_for(params.n_trees, threads, [&](std::size_t t) {
    RngStream tree_rng = rng.child(t);
    std::vector<std::size_t> sample(train.size());
    for (auto& s : sample) s = tree_rng.below(train.size());
    model.trees[t] = train_tree(train, std::move(sample), params, tree_rng);
  });
  model.importances = feature_importance(model);
  return model;
}

/// Indices of the Fn most important features, most important first; equal
/// importances keep the lower index first.
inline std::vector<std::size_t> top_feature_indices(std::span<const double> importances, std::size_t fn) {
  if (fn < 1 || fn > importances.size()) {
    throw Error(ErrorKind::BadFn, "Fn=" + std::to_string(fn) + " outside [1, " +
                                      std::to_string(importances.size()) + "]");
  }
  std::vector<std::size_t> idx(importances.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::ranges::stable_sort(idx, [&](std::size_t a, std::size_t b) { return importances[a] > importances[b]; });
  idx.resize(fn);
  return idx;
}

inline Dataset select_top_features(const Dataset& d, std::span<const double> importances, std::size_t fn) {
  require(importances.size() == d.num_features(), "importance vector length differs from feature count");
  return select_columns(d, top_feature_indices(importances, fn));
}

}  // namespace ihho
