#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "ihho/error.hpp"
#include "ihho/rng.hpp"

namespace ihho {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    require(data_.size() == rows_ * cols_, "matrix data size does not match shape");
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

  const std::vector<double>& data() const noexcept { return data_; }

  void append_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) cols_ = values.size();
    require(values.size() == cols_, "appended row has wrong width");
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }

  Matrix select_rows(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      std::ranges::copy(row(indices[i]), out.row(i).begin());
    }
    return out;
  }

  Matrix select_cols(std::span<const std::size_t> indices) const {
    Matrix out(rows_, indices.size());
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t j = 0; j < indices.size(); ++j) out(r, j) = (*this)(r, indices[j]);
    }
    return out;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

/// Row id given to rows that do not come from an input file.
inline constexpr std::size_t kSyntheticRow = std::numeric_limits<std::size_t>::max();

/// Feature matrix plus integer class labels in [0, class_names.size()).
/// `row_ids` holds each row's 0-based position in the originally parsed
/// file, so subsets and cleansed copies stay traceable.
struct Dataset {
  Matrix features;
  std::vector<int> labels;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  std::string label_name = "class";
  std::vector<std::size_t> row_ids;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t num_features() const noexcept { return features.cols(); }
  std::size_t num_classes() const noexcept { return class_names.size(); }

  std::vector<std::size_t> class_counts() const {
    std::vector<std::size_t> counts(class_names.size(), 0);
    for (int y : labels) ++counts[static_cast<std::size_t>(y)];
    return counts;
  }

  /// Checks the shape and value invariants; throws InvalidArgument.
  void validate() const {
    require(features.rows() == labels.size(), "feature rows and labels differ in length");
    require(row_ids.size() == labels.size(), "row ids and labels differ in length");
    require(feature_names.size() == features.cols(), "feature name count does not match columns");
    for (int y : labels) {
      require(y >= 0 && static_cast<std::size_t>(y) < class_names.size(), "label out of range");
    }
    for (double v : features.data()) require(std::isfinite(v), "non-finite feature value");
  }

  bool operator==(const Dataset&) const = default;
};

/// Rows `indices` of `d`, in that order.
inline Dataset subset(const Dataset& d, std::span<const std::size_t> indices) {
  Dataset out;
  out.features = d.features.select_rows(indices);
  out.labels.reserve(indices.size());
  out.row_ids.reserve(indices.size());
  for (std::size_t i : indices) {
    out.labels.push_back(d.labels[i]);
    out.row_ids.push_back(d.row_ids[i]);
  }
  out.feature_names = d.feature_names;
  out.class_names = d.class_names;
  out.label_name = d.label_name;
  return out;
}

/// Columns `indices` of `d`, in that order.
inline Dataset select_columns(const Dataset& d, std::span<const std::size_t> indices) {
  Dataset out = d;
  out.features = d.features.select_cols(indices);
  out.feature_names.clear();
  for (std::size_t j : indices) out.feature_names.push_back(d.feature_names[j]);
  return out;
}

inline std::vector<std::size_t> indices_of_class(std::span<const int> labels, int cls) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == cls) out.push_back(i);
  }
  return out;
}

struct BinaryClasses {
  int minority = 0;
  int majority = 1;
  std::size_t n_minority = 0;
  std::size_t n_majority = 0;
};

/// Identifies minority/majority of a two-class dataset. Equal counts raise
/// TieClassCounts since there is nothing to balance.
inline BinaryClasses binary_classes(const Dataset& d) {
  if (d.num_classes() != 2) {
    throw Error(ErrorKind::InvalidArgument,
                "expected a binary dataset, found " + std::to_string(d.num_classes()) + " classes");
  }
  const auto counts = d.class_counts();
  if (counts[0] == counts[1]) {
    throw Error(ErrorKind::TieClassCounts, "both classes have " + std::to_string(counts[0]) +
                                               " rows; the dataset is already balanced");
  }
  BinaryClasses bc;
  bc.minority = counts[0] < counts[1] ? 0 : 1;
  bc.majority = 1 - bc.minority;
  bc.n_minority = counts[static_cast<std::size_t>(bc.minority)];
  bc.n_majority = counts[static_cast<std::size_t>(bc.majority)];
  return bc;
}

// ---------------------------------------------------------------------------
// Standardization

/// Per-feature affine map fitted with population (1/n) statistics. Columns
/// with zero spread map to 0.
struct Scaler {
  std::vector<double> mean;
  std::vector<double> stddev;

  Matrix transform(const Matrix& m) const {
    require(m.cols() == mean.size(), "scaler width does not match matrix");
    Matrix out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) {
        out(r, c) = stddev[c] > 0.0 ? (m(r, c) - mean[c]) / stddev[c] : 0.0;
      }
    }
    return out;
  }

  Matrix inverse_transform(const Matrix& m) const {
    require(m.cols() == mean.size(), "scaler width does not match matrix");
    Matrix out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c) * stddev[c] + mean[c];
    }
    return out;
  }

  Dataset transform(const Dataset& d) const {
    Dataset out = d;
    out.features = transform(d.features);
    return out;
  }
};

inline Scaler fit_scaler(const Matrix& m) {
  require(m.rows() >= 2, "standardize needs at least two rows");
  Scaler s;
  s.mean.assign(m.cols(), 0.0);
  s.stddev.assign(m.cols(), 0.0);
  const double n = static_cast<double>(m.rows());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) sum += m(r, c);
    const double mu = sum / n;
    double ss = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) ss += (m(r, c) - mu) * (m(r, c) - mu);
    s.mean[c] = mu;
    const double sd = std::sqrt(ss / n);
    // spreads at rounding-noise level relative to the mean count as constant
    s.stddev[c] = sd > 1e-12 * std::max(1.0, std::abs(mu)) ? sd : 0.0;
  }
  return s;
}

struct Standardized {
  Dataset dataset;
  Scaler scaler;
};

inline Standardized standardize(const Dataset& d) {
  Standardized out{d, fit_scaler(d.features)};
  out.dataset.features = out.scaler.transform(d.features);
  return out;
}

// ---------------------------------------------------------------------------
// Splitting

struct SplitSpec {
  double train_fraction = 0.7;
  bool stratified = true;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

template <class T>
void shuffle(std::vector<T>& v, RngStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

/// Index-level split. Each class (or the whole set when not stratified) is
/// shuffled and its first round(f * n_c) members go to train, clamped so both
/// sides keep at least one member. Both index lists come back sorted.
inline SplitIndices split_indices(std::span<const int> labels, std::size_t num_classes,
                                  const SplitSpec& spec, RngStream rng) {
  require(spec.train_fraction > 0.0 && spec.train_fraction < 1.0, "train_fraction must lie in (0,1)");
  std::vector<std::vector<std::size_t>> groups;
  if (spec.stratified) {
    groups.resize(num_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) groups[static_cast<std::size_t>(labels[i])].push_back(i);
    for (std::size_t c = 0; c < num_classes; ++c) {
      if (groups[c].size() < 2) {
        throw Error(ErrorKind::ClassTooSmall,
                    "class " + std::to_string(c) + " has " + std::to_string(groups[c].size()) +
                        " rows; stratified splitting needs at least 2");
      }
    }
  } else {
    require(labels.size() >= 2, "splitting needs at least two rows");
    groups.emplace_back(labels.size());
    std::iota(groups[0].begin(), groups[0].end(), std::size_t{0});
  }

  SplitIndices out;
  for (auto& g : groups) {
    shuffle(g, rng);
    auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(g.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, g.size() - 1);
    out.train.insert(out.train.end(), g.begin(), g.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.insert(out.test.end(), g.begin() + static_cast<std::ptrdiff_t>(n_train), g.end());
  }
  std::ranges::sort(out.train);
  std::ranges::sort(out.test);
  return out;
}

struct TrainTest {
  Dataset train;
  Dataset test;
};

inline TrainTest stratified_split(const Dataset& d, const SplitSpec& spec, RngStream rng) {
  const auto idx = split_indices(d.labels, d.num_classes(), spec, std::move(rng));
  return {subset(d, idx.train), subset(d, idx.test)};
}

/// Stratified fold assignment: each class is shuffled and dealt round-robin
/// over `folds` folds, so fold class counts differ by at most one.
inline std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t num_classes,
                                                 std::size_t folds, RngStream rng) {
  require(folds >= 2, "need at least two folds");
  std::vector<std::vector<std::size_t>> groups(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) groups[static_cast<std::size_t>(labels[i])].push_back(i);
  std::vector<std::size_t> fold(labels.size());
  std::size_t offset = 0;
  for (auto& g : groups) {
    if (g.size() < folds) {
      throw Error(ErrorKind::ClassTooSmall, "a class has " + std::to_string(g.size()) + " rows, fewer than " +
                                                std::to_string(folds) + " folds");
    }
    shuffle(g, rng);
    for (std::size_t j = 0; j < g.size(); ++j) fold[g[j]] = (offset + j) % folds;
    offset += g.size();
  }
  return fold;
}

/// Rows of fold `f` as test, the rest as train.
inline TrainTest fold_split(const Dataset& d, std::span<const std::size_t> fold, std::size_t f) {
  std::vector<std::size_t> train, test;
  for (std::size_t i = 0; i < d.size(); ++i) (fold[i] == f ? test : train).push_back(i);
  return {subset(d, train), subset(d, test)};
}

// ---------------------------------------------------------------------------
// Concurrency

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items must be
/// independent; results are written by index so the outcome does not depend
/// on scheduling. The first exception thrown by any item is rethrown.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n && !failed; i = next++) {
          try {
            fn(i);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ihho
