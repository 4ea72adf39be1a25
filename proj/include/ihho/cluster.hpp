#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "ihho/core.hpp"

namespace ihho {

struct DbscanParams {
  double epsilon = 0.5;
  std::size_t min_pts = 5;
};

enum class PointKind { Core, Border, Noise };

inline const char* to_string(PointKind k) {
  switch (k) {
    case PointKind::Core: return "core";
    case PointKind::Border: return "border";
    case PointKind::Noise: return "noise";
  }
  return "?";
}

struct PointLabel {
  PointKind kind = PointKind::Noise;
  std::optional<std::size_t> cluster;

  bool operator==(const PointLabel&) const = default;
};

/// DBSCAN over Euclidean distance.
///
/// A point is core when its epsilon-ball, itself included, holds at least
/// min_pts points. Clusters are the connected components of core points
/// under the epsilon relation, numbered in order of their lowest-index core
/// point. A non-core point within epsilon of some core point is border and
/// joins the cluster of its nearest such core point (lower index on equal
/// distance); everything else is noise. The result is independent of scan
/// order.
inline std::vector<PointLabel> dbscan(const Matrix& points, const DbscanParams& params) {
  require(params.epsilon > 0.0, "epsilon must be positive");
  require(params.min_pts >= 1, "min_pts must be at least 1");
  const std::size_t n = points.rows();
  const double eps2 = params.epsilon * params.epsilon;

  std::vector<std::vector<std::size_t>> hood(n);
  for (std::size_t i = 0; i < n; ++i) {
    hood[i].push_back(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (squared_distance(points.row(i), points.row(j)) <= eps2) {
        hood[i].push_back(j);
        hood[j].push_back(i);
      }
    }
  }

  std::vector<PointLabel> labels(n);
  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i) core[i] = hood[i].size() >= params.min_pts;

  std::size_t next_cluster = 0;
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i] || labels[i].cluster) continue;
    const std::size_t id = next_cluster++;
    labels[i] = {PointKind::Core, id};
    stack.assign(1, i);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      for (std::size_t q : hood[p]) {
        if (core[q] && !labels[q].cluster) {
          labels[q] = {PointKind::Core, id};
          stack.push_back(q);
        }
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    std::optional<std::size_t> nearest;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t q : hood[i]) {
      if (!core[q]) continue;
      const double d = squared_distance(points.row(i), points.row(q));
      if (d < best || (d == best && q < *nearest)) {
        best = d;
        nearest = q;
      }
    }
    labels[i] = nearest ? PointLabel{PointKind::Border, labels[*nearest].cluster} : PointLabel{PointKind::Noise, {}};
  }
  return labels;
}

/// Data-driven defaults: min_pts = max(4, ceil(ln n)) and epsilon = the
/// median over points of the distance to the min_pts-th nearest other point.
inline DbscanParams auto_dbscan_params(const Matrix& points, std::optional<double> epsilon = {},
                                       std::optional<std::size_t> min_pts = {}, double quantile = 0.5) {
  const std::size_t n = points.rows();
  require(n >= 2, "automatic DBSCAN parameters need at least two points");
  DbscanParams p;
  p.min_pts = min_pts.value_or(
      std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(n))))));
  if (epsilon) {
    p.epsilon = *epsilon;
    return p;
  }
  const std::size_t k = std::min(p.min_pts, n - 1);
  std::vector<double> kdist(n);
  std::vector<double> d;
  d.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    d.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) d.push_back(squared_distance(points.row(i), points.row(j)));
    }
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k - 1), d.end());
    kdist[i] = std::sqrt(d[k - 1]);
  }
  std::ranges::sort(kdist);
  const double median = quantile == 0.5 ? (n % 2 == 1 ? kdist[n / 2] : 0.5 * (kdist[n / 2 - 1] + kdist[n / 2]))
                                        : kdist[static_cast<std::size_t>(std::llround(quantile * static_cast<double>(n - 1)))];
  if (median > 0.0) {
    p.epsilon = median;
  } else {
    const auto pos = std::ranges::upper_bound(kdist, 0.0);
    p.epsilon = pos != kdist.end() ? *pos : 1e-9;
  }
  return p;
}

struct CleansePolicy {
  bool remove_border = true;
  /// Minority rows that must survive.
  std::size_t min_keep = 6;
};

struct CleanseResult {
  Dataset dataset;
  /// Positions (in the input dataset) of the removed rows, ascending.
  std::vector<std::size_t> removed;
  /// Candidates kept back to honor min_keep.
  std::size_t restored = 0;
};

/// Drops minority rows DBSCAN marked noise (and border, per policy). Majority
/// rows always stay. When removal would leave fewer than min_keep minority
/// rows, candidates are kept back: border points first, then noise points,
/// each group ordered by distance to the nearest core point. `labels` must
/// come from dbscan on `dataset.features`.
inline CleanseResult cleanse_minority(const Dataset& dataset, std::span<const PointLabel> labels,
                                      const CleansePolicy& policy) {
  require(labels.size() == dataset.size(), "labels and dataset differ in length");
  const auto bc = binary_classes(dataset);
  if (bc.n_minority < policy.min_keep) {
    throw Error(ErrorKind::MinorityCollapsed, "minority class has " + std::to_string(bc.n_minority) +
                                                  " rows, fewer than min_keep=" + std::to_string(policy.min_keep));
  }

  std::vector<std::size_t> cores;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].kind == PointKind::Core) cores.push_back(i);
  }
  auto core_distance = [&](std::size_t i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c : cores) best = std::min(best, squared_distance(dataset.features.row(i), dataset.features.row(c)));
    return best;
  };

  struct Candidate {
    int group;  // 0 = border, 1 = noise
    double dist;
    std::size_t index;
  };
  std::vector<Candidate> cand;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset.labels[i] != bc.minority) continue;
    if (labels[i].kind == PointKind::Noise) cand.push_back({1, core_distance(i), i});
    if (labels[i].kind == PointKind::Border && policy.remove_border) cand.push_back({0, core_distance(i), i});
  }

  CleanseResult out;
  const std::size_t survivors = bc.n_minority - cand.size();
  if (survivors < policy.min_keep) {
    out.restored = policy.min_keep - survivors;
    std::ranges::sort(cand, [](const Candidate& a, const Candidate& b) {
      if (a.group != b.group) return a.group < b.group;
      if (a.dist != b.dist) return a.dist < b.dist;
      return a.index < b.index;
    });
    cand.erase(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(out.restored));
  }
  for (const auto& c : cand) out.removed.push_back(c.index);
  std::ranges::sort(out.removed);

  std::vector<std::size_t> keep;
  for (std::size_t i = 0, r = 0; i < dataset.size(); ++i) {
    if (r < out.removed.size() && out.removed[r] == i) {
      ++r;
      continue;
    }
    keep.push_back(i);
  }
  out.dataset = subset(dataset, keep);
  return out;
}

}  // namespace ihho
