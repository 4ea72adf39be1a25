#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "ihho/core.hpp"

namespace ihho {

struct Neighbor {
  std::size_t index = 0;
  /// Euclidean distance (comparisons use the squared value).
  double distance = 0.0;

  bool operator==(const Neighbor&) const = default;
};

namespace detail {

struct Candidate {
  double sq;
  std::size_t index;
  bool operator<(const Candidate& o) const noexcept { return sq < o.sq || (sq == o.sq && index < o.index); }
};

}  // namespace detail

/// The k rows of `points` closest to `query`, nearest first; equal distances
/// order by lower index. `exclude` removes one row (the query's own row when
/// the query is drawn from `points`).
inline std::vector<Neighbor> k_nearest(const Matrix& points, std::span<const double> query, std::size_t k,
                                       std::optional<std::size_t> exclude = std::nullopt) {
  const std::size_t available = points.rows() - (exclude && *exclude < points.rows() ? 1 : 0);
  if (k > available) {
    throw Error(ErrorKind::KTooLarge,
                "k=" + std::to_string(k) + " exceeds the " + std::to_string(available) + " candidate rows");
  }
  std::vector<detail::Candidate> cand;
  cand.reserve(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    if (exclude && i == *exclude) continue;
    cand.push_back({squared_distance(points.row(i), query), i});
  }
  std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
  std::vector<Neighbor> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = {cand[i].index, std::sqrt(cand[i].sq)};
  return out;
}

/// Neighbor lists of every row of `points` among the other rows.
inline std::vector<std::vector<std::size_t>> neighbor_table(const Matrix& points, std::size_t k) {
  std::vector<std::vector<std::size_t>> out(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    for (const auto& n : k_nearest(points, points.row(i), k, i)) out[i].push_back(n.index);
  }
  return out;
}

struct KnnModel {
  Matrix train_features;
  std::vector<int> train_labels;
  std::size_t k = 5;
  /// Class whose neighbor share is reported as the score.
  int positive = 1;
};

struct KnnPrediction {
  std::vector<int> labels;
  std::vector<double> scores;
};

/// Vote over a nearest-first list of binary labels: majority wins; a tied
/// vote goes to the class of the nearest neighbor.
inline int vote(std::span<const int> neighbor_labels) {
  if (neighbor_labels.empty()) return 0;
  const auto ones = static_cast<std::size_t>(std::ranges::count(neighbor_labels, 1));
  const std::size_t zeros = neighbor_labels.size() - ones;
  if (ones != zeros) return ones > zeros ? 1 : 0;
  return neighbor_labels[0];
}

inline KnnPrediction knn_predict(const KnnModel& model, const Matrix& queries) {
  require(model.k >= 1 && model.k <= model.train_features.rows(), "KNN needs 1 <= k <= training rows");
  KnnPrediction out;
  out.labels.resize(queries.rows());
  out.scores.resize(queries.rows());
  std::vector<int> nl(model.k);
  for (std::size_t q = 0; q < queries.rows(); ++q) {
    const auto nn = k_nearest(model.train_features, queries.row(q), model.k);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < nn.size(); ++i) {
      nl[i] = model.train_labels[nn[i].index];
      pos += nl[i] == model.positive ? 1 : 0;
    }
    out.labels[q] = vote(nl);
    out.scores[q] = static_cast<double>(pos) / static_cast<double>(model.k);
  }
  return out;
}

/// KNN over a fixed base set plus a varying extra set, with the base part
/// of every query's neighbor search done once. Extra rows take indices after
/// the base rows, so results are identical to knn_predict on the
/// concatenation (base rows first).
class IncrementalKnn {
 public:
  IncrementalKnn(const Matrix& base, std::vector<int> base_labels, const Matrix& queries, std::size_t k,
                 int positive)
      : base_labels_(std::move(base_labels)), queries_(queries), k_(k), positive_(positive) {
    require(k >= 1, "KNN needs k >= 1");
    const std::size_t kb = std::min(k, base.rows());
    best_.resize(queries.rows());
    for (std::size_t q = 0; q < queries.rows(); ++q) {
      auto& cand = best_[q];
      cand.reserve(base.rows());
      for (std::size_t i = 0; i < base.rows(); ++i) cand.push_back({squared_distance(base.row(i), queries.row(q)), i});
      std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(kb), cand.end());
      cand.resize(kb);
      cand.shrink_to_fit();
    }
    base_rows_ = base.rows();
  }

  KnnPrediction predict(const Matrix& extra, std::span<const int> extra_labels) const {
    require(base_rows_ + extra.rows() >= k_, "KNN needs k <= training rows");
    KnnPrediction out;
    out.labels.resize(queries_.rows());
    out.scores.resize(queries_.rows());
    std::vector<detail::Candidate> cand;
    std::vector<int> nl(k_);
    for (std::size_t q = 0; q < queries_.rows(); ++q) {
      cand.assign(best_[q].begin(), best_[q].end());
      for (std::size_t e = 0; e < extra.rows(); ++e) {
        cand.push_back({squared_distance(extra.row(e), queries_.row(q)), base_rows_ + e});
      }
      std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k_), cand.end());
      std::size_t pos = 0;
      for (std::size_t i = 0; i < k_; ++i) {
        const auto idx = cand[i].index;
        nl[i] = idx < base_rows_ ? base_labels_[idx] : extra_labels[idx - base_rows_];
        pos += nl[i] == positive_ ? 1 : 0;
      }
      out.labels[q] = vote(nl);
      out.scores[q] = static_cast<double>(pos) / static_cast<double>(k_);
    }
    return out;
  }

 private:
  std::vector<int> base_labels_;
  Matrix queries_;
  std::size_t k_;
  int positive_;
  std::size_t base_rows_ = 0;
  std::vector<std::vector<detail::Candidate>> best_;
};

}  // namespace ihho
