#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "ihho/core.hpp"
#include "ihho/neighbors.hpp"

namespace ihho {

struct SmoteParams {
  /// Interpolation position along A->B (sample rate).
  double s = 0.5;
  std::size_t k = 5;
  std::size_t target_count = 0;
  /// Draw a fresh U[0,1) gap per synthetic row instead of using `s`.
  bool uniform_gap = false;
};

/// Where a synthetic row came from: C = A + gap * (B - A), with A and B
/// given as row positions in the minority matrix.
struct SmoteOrigin {
  std::size_t a = 0;
  std::size_t b = 0;
  double gap = 0.0;
};

struct SmoteResult {
  Matrix rows;
  std::vector<SmoteOrigin> origins;
};

namespace detail {

// A + gap * (B - A), written so that gap 0 and 1 return A and B exactly.
inline void interpolate(std::span<const double> a, std::span<const double> b, double gap, std::span<double> out) {
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = (1.0 - gap) * a[j] + gap * b[j];
}

inline void check_minority(std::size_t rows, std::size_t k) {
  if (rows <= k) {
    throw Error(ErrorKind::TooFewMinority, "minority has " + std::to_string(rows) + " rows; k=" +
                                               std::to_string(k) + " neighbors need at least " +
                                               std::to_string(k + 1));
  }
}

}  // namespace detail

/// SMOTE with a fixed sample rate: each synthetic row picks A uniformly from
/// the minority rows and B uniformly from A's k nearest minority neighbors
/// (A excluded), then emits A + s * (B - A). Row i draws only from
/// rng.child(i).
inline SmoteResult smote(const Matrix& minority, const SmoteParams& params, const RngStream& rng) {
  require(params.k >= 1, "SMOTE needs k >= 1");
  require(params.uniform_gap || (params.s >= 0.0 && params.s <= 1.0), "sample rate must lie in [0,1]");
  detail::check_minority(minority.rows(), params.k);
  const auto table = neighbor_table(minority, params.k);

  SmoteResult out{Matrix(params.target_count, minority.cols()), std::vector<SmoteOrigin>(params.target_count)};
  for (std::size_t i = 0; i < params.target_count; ++i) {
    RngStream r = rng.child(i);
    const auto a = static_cast<std::size_t>(r.below(minority.rows()));
    const std::size_t b = table[a][r.below(params.k)];
    const double gap = params.uniform_gap ? r.uniform() : params.s;
    detail::interpolate(minority.row(a), minority.row(b), gap, out.rows.row(i));
    out.origins[i] = {a, b, gap};
  }
  return out;
}

enum class ResamplerKind { None, Smote, Borderline1, Borderline2, Adasyn, RandomSmote };

inline const char* to_string(ResamplerKind k) {
  switch (k) {
    case ResamplerKind::None: return "none";
    case ResamplerKind::Smote: return "smote";
    case ResamplerKind::Borderline1: return "borderline1";
    case ResamplerKind::Borderline2: return "borderline2";
    case ResamplerKind::Adasyn: return "adasyn";
    case ResamplerKind::RandomSmote: return "random_smote";
  }
  return "?";
}

inline ResamplerKind resampler_from_string(const std::string& name) {
  for (auto k : {ResamplerKind::None, ResamplerKind::Smote, ResamplerKind::Borderline1, ResamplerKind::Borderline2,
                 ResamplerKind::Adasyn, ResamplerKind::RandomSmote}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown resampler '" + name + "'");
}

struct ResampleOptions {
  /// Minority neighbors used for interpolation.
  std::size_t k = 5;
  /// Whole-set neighbors used to judge danger (borderline) or difficulty (ADASYN).
  std::size_t m = 5;
};

struct ResampleResult {
  Dataset dataset;
  std::size_t synthetic = 0;
  std::vector<std::string> warnings;
};

/// Positions (within `minority_idx`) of minority rows whose majority share
/// among their m nearest rows of the whole set lies in [0.5, 1).
inline std::vector<std::size_t> danger_set(const Dataset& train, std::span<const std::size_t> minority_idx,
                                           int minority, std::size_t m) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < minority_idx.size(); ++i) {
    const auto nn = k_nearest(train.features, train.features.row(minority_idx[i]), m, minority_idx[i]);
    std::size_t maj = 0;
    for (const auto& n : nn) maj += train.labels[n.index] != minority ? 1 : 0;
    if (2 * maj >= m && maj < m) out.push_back(i);
  }
  return out;
}

/// Appends `amount` synthetic minority rows generated by `kind`. Baselines
/// use the classic per-row uniform gap. Borderline variants with an empty
/// danger set fall back to plain SMOTE and say so in `warnings`.
inline ResampleResult resample(ResamplerKind kind, const Dataset& train, std::size_t amount, const RngStream& rng,
                               const ResampleOptions& opt = {}) {
  ResampleResult out{train, 0, {}};
  if (kind == ResamplerKind::None || amount == 0) return out;

  const auto bc = binary_classes(train);
  const auto min_idx = indices_of_class(train.labels, bc.minority);
  const Matrix minority = train.features.select_rows(min_idx);
  detail::check_minority(minority.rows(), opt.k);
  require(opt.m >= 1 && opt.m < train.size(), "neighbor count m must be below the training size");

  Matrix synth(amount, train.num_features());
  std::vector<std::size_t> danger;
  if (kind == ResamplerKind::Borderline1 || kind == ResamplerKind::Borderline2) {
    danger = danger_set(train, min_idx, bc.minority, opt.m);
    if (danger.empty()) {
      out.warnings.push_back(std::string("NoDangerPoints: ") + to_string(kind) + " fell back to smote");
      kind = ResamplerKind::Smote;
    }
  }

  switch (kind) {
    case ResamplerKind::Smote: {
      const auto r = smote(minority, {0.0, opt.k, amount, true}, rng);
      synth = r.rows;
      break;
    }
    case ResamplerKind::Borderline1: {
      const auto table = neighbor_table(minority, opt.k);
      for (std::size_t i = 0; i < amount; ++i) {
        RngStream r = rng.child(i);
        const std::size_t a = danger[r.below(danger.size())];
        const std::size_t b = table[a][r.below(opt.k)];
        detail::interpolate(minority.row(a), minority.row(b), r.uniform(), synth.row(i));
      }
      break;
    }
    case ResamplerKind::Borderline2: {
      for (std::size_t i = 0; i < amount; ++i) {
        RngStream r = rng.child(i);
        const std::size_t a = danger[r.below(danger.size())];
        const auto nn = k_nearest(train.features, minority.row(a), opt.k, min_idx[a]);
        const std::size_t b = nn[r.below(opt.k)].index;
        // toward a majority neighbor, stay on the minority half of the segment
        const double gap = train.labels[b] == bc.minority ? r.uniform() : 0.5 * r.uniform();
        detail::interpolate(minority.row(a), train.features.row(b), gap, synth.row(i));
      }
      break;
    }
    case ResamplerKind::Adasyn: {
      std::vector<double> ratio(min_idx.size());
      for (std::size_t i = 0; i < min_idx.size(); ++i) {
        const auto nn = k_nearest(train.features, minority.row(i), opt.m, min_idx[i]);
        std::size_t maj = 0;
        for (const auto& n : nn) maj += train.labels[n.index] != bc.minority ? 1 : 0;
        ratio[i] = static_cast<double>(maj) / static_cast<double>(opt.m);
      }
      double total = std::accumulate(ratio.begin(), ratio.end(), 0.0);
      if (total == 0.0) {
        out.warnings.push_back("adasyn: no minority row has majority neighbors; allocation is uniform");
        std::ranges::fill(ratio, 1.0);
        total = static_cast<double>(ratio.size());
      }
      // largest-remainder allocation of `amount` proportional to ratio
      std::vector<std::size_t> count(ratio.size());
      std::vector<std::pair<double, std::size_t>> rem;
      std::size_t assigned = 0;
      for (std::size_t i = 0; i < ratio.size(); ++i) {
        const double exact = static_cast<double>(amount) * ratio[i] / total;
        count[i] = static_cast<std::size_t>(std::floor(exact));
        assigned += count[i];
        rem.emplace_back(exact - std::floor(exact), i);
      }
      std::ranges::stable_sort(rem, [](const auto& x, const auto& y) { return x.first > y.first; });
      for (std::size_t j = 0; assigned < amount; ++j, ++assigned) ++count[rem[j % rem.size()].second];

      const auto table = neighbor_table(minority, opt.k);
      std::size_t row = 0;
      for (std::size_t a = 0; a < count.size(); ++a) {
        for (std::size_t c = 0; c < count[a]; ++c, ++row) {
          RngStream r = rng.child(row);
          const std::size_t b = table[a][r.below(opt.k)];
          detail::interpolate(minority.row(a), minority.row(b), r.uniform(), synth.row(row));
        }
      }
      break;
    }
    case ResamplerKind::RandomSmote: {
      const auto table = neighbor_table(minority, opt.k);
      std::vector<double> t(train.num_features());
      for (std::size_t i = 0; i < amount; ++i) {
        RngStream r = rng.child(i);
        const auto a = static_cast<std::size_t>(r.below(minority.rows()));
        const std::size_t j1 = r.below(opt.k);
        std::size_t j2 = j1;
        if (opt.k > 1) {
          j2 = r.below(opt.k - 1);
          if (j2 >= j1) ++j2;
        }
        // a point of segment y1-y2, then a point between A and it: inside triangle (A, y1, y2)
        detail::interpolate(minority.row(table[a][j1]), minority.row(table[a][j2]), r.uniform(), t);
        detail::interpolate(minority.row(a), t, r.uniform(), synth.row(i));
      }
      break;
    }
    case ResamplerKind::None:
      break;
  }

  for (std::size_t i = 0; i < amount; ++i) {
    out.dataset.features.append_row(synth.row(i));
    out.dataset.labels.push_back(bc.minority);
    out.dataset.row_ids.push_back(kSyntheticRow);
  }
  out.synthetic = amount;
  return out;
}

}  // namespace ihho
