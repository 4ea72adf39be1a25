#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "ihho/error.hpp"

namespace ihho {

struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Counts with `positive` as the positive class; any other label is negative.
inline ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred, int positive) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorKind::LengthMismatch, std::to_string(y_true.size()) + " truths vs " +
                                               std::to_string(y_pred.size()) + " predictions");
  }
  require(!y_true.empty(), "confusion matrix needs at least one instance");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool t = y_true[i] == positive;
    const bool p = y_pred[i] == positive;
    if (t && p) ++cm.tp;
    else if (!t && p) ++cm.fp;
    else if (!t && !p) ++cm.tn;
    else ++cm.fn;
  }
  return cm;
}

struct Scores {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double specificity = 0.0;
  double fpr = 0.0;
  double fnr = 0.0;
  double f1 = 0.0;
  double gmean = 0.0;
  double auc_point = 0.0;
};

namespace detail {
/// a / b with 0/0 taken as 0.
inline double ratio(std::uint64_t a, std::uint64_t b) {
  return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
}
}  // namespace detail

/// Rates from a confusion matrix. G-mean = sqrt(recall * specificity),
/// F1 = 2TP / (2TP + FP + FN), point AUC = (1 + TPR - FPR) / 2. Any ratio with
/// a zero denominator is 0.
inline Scores score(const ConfusionMatrix& cm) {
  require(cm.total() > 0, "scores need at least one instance");
  Scores s;
  s.accuracy = detail::ratio(cm.tp + cm.tn, cm.total());
  s.precision = detail::ratio(cm.tp, cm.tp + cm.fp);
  s.recall = detail::ratio(cm.tp, cm.tp + cm.fn);
  s.specificity = detail::ratio(cm.tn, cm.tn + cm.fp);
  s.fpr = detail::ratio(cm.fp, cm.tn + cm.fp);
  s.fnr = detail::ratio(cm.fn, cm.tp + cm.fn);
  s.f1 = detail::ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn);
  s.gmean = std::sqrt(s.recall * s.specificity);
  s.auc_point = (1.0 + s.recall - s.fpr) / 2.0;
  return s;
}

/// Area under the ROC curve for `scores` (higher = more positive), computed
/// as the Mann-Whitney statistic with mid-ranks for tied scores.
inline double roc_auc(std::span<const double> scores, std::span<const int> y_true, int positive = 1) {
  if (scores.size() != y_true.size()) throw Error(ErrorKind::LengthMismatch, "scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::sort(order, [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (y_true[order[k]] == positive) {
        rank_sum += mid_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw Error(ErrorKind::OneClassOnly, "ROC AUC needs both classes present");
  const double np = static_cast<double>(n_pos);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

}  // namespace ihho
