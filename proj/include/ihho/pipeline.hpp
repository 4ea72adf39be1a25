#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ihho/cluster.hpp"
#include "ihho/core.hpp"
#include "ihho/forest.hpp"
#include "ihho/hho.hpp"
#include "ihho/metrics.hpp"
#include "ihho/neighbors.hpp"
#include "ihho/resample.hpp"

namespace ihho {

enum class FitnessMetric { GMean, Accuracy, F1 };
/// How many synthetic rows a rate s asks for: Rate = round(s * gap),
/// Balance = the whole class gap (s then only sets the interpolation point).
enum class AmountMode { Rate, Balance };

inline const char* to_string(FitnessMetric m) {
  switch (m) {
    case FitnessMetric::GMean: return "gmean";
    case FitnessMetric::Accuracy: return "accuracy";
    case FitnessMetric::F1: return "f1";
  }
  return "?";
}

/// Rows DBSCAN clusters before minority cleansing.
enum class DbscanScope { Global, Minority };

inline const char* to_string(DbscanScope s) { return s == DbscanScope::Global ? "global" : "minority"; }

inline const char* to_string(AmountMode m) { return m == AmountMode::Rate ? "rate" : "balance"; }

struct PipelineConfig {
  /// Features kept after forest ranking; 0 keeps all of them.
  std::size_t fn = 0;
  ForestParams forest;
  /// Unset values are chosen by auto_dbscan_params.
  std::optional<double> epsilon;
  std::optional<std::size_t> min_pts;
  /// Quantile of the k-distances used as the automatic epsilon.
  double eps_quantile = 0.5;
  DbscanScope dbscan_scope = DbscanScope::Global;
  bool cleanse = true;
  CleansePolicy cleanse_policy;
  std::size_t population = 10;
  std::size_t iterations = 30;
  double s_lower = 0.05;
  double s_upper = 1.0;
  double beta = 1.5;
  bool literal_hard_besiege = false;
  bool literal_levy = false;
  std::size_t patience = 0;
  std::size_t smote_k = 5;
  std::size_t knn_k = 5;
  FitnessMetric metric = FitnessMetric::GMean;
  AmountMode amount = AmountMode::Balance;
  bool uniform_gap = false;
  bool standardize = true;
  SplitSpec split;
  double inner_train_fraction = 0.75;
  /// Fitness averaged over this many stratified folds; 0 or 1 uses the single
  /// inner split.
  std::size_t inner_folds = 0;
  std::size_t threads = 1;
};

/// Stream keys under the run stream.
namespace stream {
inline constexpr std::uint64_t kSplit = 1;
inline constexpr std::uint64_t kForest = 2;
inline constexpr std::uint64_t kInnerSplit = 3;
inline constexpr std::uint64_t kHho = 4;
inline constexpr std::uint64_t kFitnessSmote = 5;
inline constexpr std::uint64_t kFinalSmote = 6;
inline constexpr std::uint64_t kResample = 7;
}  // namespace stream

inline double metric_value(FitnessMetric m, const Scores& s) {
  switch (m) {
    case FitnessMetric::GMean: return s.gmean;
    case FitnessMetric::Accuracy: return s.accuracy;
    case FitnessMetric::F1: return s.f1;
  }
  return 0.0;
}

inline std::size_t synthetic_target(double s, std::size_t gap, AmountMode mode) {
  return mode == AmountMode::Balance ? gap : static_cast<std::size_t>(std::llround(s * static_cast<double>(gap)));
}

/// SMOTE neighbor count actually usable for `n_minority` rows.
inline std::size_t usable_smote_k(std::size_t k, std::size_t n_minority) {
  if (n_minority < 2) {
    throw Error(ErrorKind::TooFewMinority, "SMOTE needs at least two minority rows, found " + std::to_string(n_minority));
  }
  return std::min(k, n_minority - 1);
}

/// Validation-set quality of a sample rate: SMOTE the training minority at
/// rate s, fit KNN on the augmented set, score the validation rows. The
/// training-set part of each validation row's neighbor search is computed
/// once in the constructor; the SMOTE stream is the same for every s.
class RateFitness {
 public:
  RateFitness(const Dataset& train, const Dataset& val, const PipelineConfig& config, RngStream smote_rng)
      : classes_(binary_classes(train)),
        minority_(train.features.select_rows(indices_of_class(train.labels, classes_.minority))),
        gap_(classes_.n_majority - classes_.n_minority),
        k_(usable_smote_k(config.smote_k, classes_.n_minority)),
        metric_(config.metric),
        amount_(config.amount),
        uniform_gap_(config.uniform_gap),
        val_labels_(val.labels),
        smote_rng_(std::move(smote_rng)),
        knn_(train.features, train.labels, val.features, config.knn_k, classes_.minority) {
    require(config.knn_k <= train.size(), "KNN k exceeds the training rows");
    const auto counts = val.class_counts();
    require(counts.size() == 2 && counts[0] > 0 && counts[1] > 0, "validation set must contain both classes");
  }

  std::size_t smote_k() const noexcept { return k_; }

  KnnPrediction predict(double s) const {
    const SmoteParams sp{s, k_, synthetic_target(s, gap_, amount_), uniform_gap_};
    const auto synth = smote(minority_, sp, smote_rng_);
    const std::vector<int> labels(synth.rows.rows(), classes_.minority);
    return knn_.predict(synth.rows, labels);
  }

  double evaluate(double s) const {
    const auto pred = predict(s);
    return metric_value(metric_, score(confusion(val_labels_, pred.labels, classes_.minority)));
  }

  double operator()(std::span<const double> position) const { return evaluate(position[0]); }

 private:
  BinaryClasses classes_;
  Matrix minority_;
  std::size_t gap_;
  std::size_t k_;
  FitnessMetric metric_;
  AmountMode amount_;
  bool uniform_gap_;
  std::vector<int> val_labels_;
  RngStream smote_rng_;
  IncrementalKnn knn_;
};

inline double fitness_of_rate(double s, const Dataset& cleansed_train, const Dataset& val,
                              const PipelineConfig& config, const RngStream& smote_rng) {
  return RateFitness(cleansed_train, val, config, smote_rng).evaluate(s);
}

/// Mean RateFitness over one or more (train, validation) pairs. Pair j uses
/// SMOTE stream smote_rng.child(j) when there are several pairs.
class SampleRateFitness {
 public:
  SampleRateFitness(std::span<const TrainTest> parts, const PipelineConfig& config, const RngStream& smote_rng) {
    require(!parts.empty(), "fitness needs at least one validation split");
    for (std::size_t j = 0; j < parts.size(); ++j) {
      parts_.emplace_back(parts[j].train, parts[j].test, config, parts.size() == 1 ? smote_rng : smote_rng.child(j));
    }
  }

  std::size_t smote_k() const {
    std::size_t k = parts_[0].smote_k();
    for (const auto& p : parts_) k = std::min(k, p.smote_k());
    return k;
  }

  double evaluate(double s) const {
    double sum = 0.0;
    for (const auto& p : parts_) sum += p.evaluate(s);
    return sum / static_cast<double>(parts_.size());
  }

  double operator()(std::span<const double> position) const { return evaluate(position[0]); }

 private:
  std::vector<RateFitness> parts_;
};

struct FeatureSelection {
  std::vector<double> importances;
  /// Kept columns, most important first.
  std::vector<std::size_t> columns;
};

inline FeatureSelection select_features(const Dataset& train, const PipelineConfig& config, const RngStream& rng) {
  const std::size_t fn = config.fn == 0 ? train.num_features() : config.fn;
  FeatureSelection fs;
  fs.importances = train_forest(train, config.forest, rng, config.threads).importances;
  fs.columns = top_feature_indices(fs.importances, fn);
  return fs;
}

struct CleanseStage {
  DbscanParams params;
  std::vector<PointLabel> labels;
  CleanseResult result;
};

/// DBSCAN followed by minority cleansing. With global scope DBSCAN sees all
/// rows of `train`; with minority scope it clusters the minority rows alone
/// and majority rows are labeled noise (cleansing never removes them and
/// they do not count as core points for restoration order).
inline CleanseStage cleanse_stage(const Dataset& train, const PipelineConfig& config) {
  CleanseStage st;
  if (config.dbscan_scope == DbscanScope::Minority) {
    const auto bc = binary_classes(train);
    const auto idx = indices_of_class(train.labels, bc.minority);
    const Matrix pts = train.features.select_rows(idx);
    st.params = auto_dbscan_params(pts, config.epsilon, config.min_pts, config.eps_quantile);
    const auto lab = dbscan(pts, st.params);
    st.labels.assign(train.size(), PointLabel{PointKind::Noise, std::nullopt});
    for (std::size_t j = 0; j < idx.size(); ++j) st.labels[idx[j]] = lab[j];
  } else {
    st.params = auto_dbscan_params(train.features, config.epsilon, config.min_pts, config.eps_quantile);
    st.labels = dbscan(train.features, st.params);
  }
  st.result = cleanse_minority(train, st.labels, config.cleanse_policy);
  return st;
}

struct BalancedDataset {
  /// Cleansed original rows followed by synthetic rows, in the selected
  /// feature space and original units.
  Dataset dataset;
  std::vector<bool> synthetic;
  double s_star = 0.0;
  /// Input row ids removed by cleansing, ascending.
  std::vector<std::size_t> removed_row_ids;
};

struct PipelineReport {
  int minority = 0;
  std::string minority_name;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::vector<double> importances;
  std::vector<std::string> selected_features;
  std::optional<DbscanParams> dbscan;
  std::size_t noise_removed = 0;
  std::size_t border_removed = 0;
  std::size_t restored = 0;
  std::size_t smote_k = 0;
  std::size_t synthetic = 0;
  double s_star = 0.0;
  double best_fitness = 0.0;
  HhoTrace trace;
  Scores metrics;
  double roc_auc = 0.0;
  std::vector<std::string> warnings;
  /// Input row ids seen by any fitness evaluation, ascending.
  std::vector<std::size_t> fitness_row_ids;
  std::vector<std::size_t> test_row_ids;
};

struct PipelineResult {
  BalancedDataset balanced;
  PipelineReport report;
};

struct Evaluation {
  Scores metrics;
  double roc_auc = 0.0;
};

/// Fits KNN on `train` and scores it on `test` with the minority as positive.
inline Evaluation evaluate_knn(const Dataset& train, const Dataset& test, std::size_t k, int positive) {
  KnnModel model{train.features, train.labels, k, positive};
  const auto pred = knn_predict(model, test.features);
  Evaluation ev;
  ev.metrics = score(confusion(test.labels, pred.labels, positive));
  ev.roc_auc = roc_auc(pred.scores, test.labels, positive);
  return ev;
}

/// Feature selection, standardization, DBSCAN cleansing, HHO search over the
/// sample rate on an inner validation split, final SMOTE at the best rate,
/// and KNN evaluation on `test`. The test rows are only used in the last
/// step.
inline PipelineResult run_pipeline(const Dataset& train_in, const Dataset& test_in, const PipelineConfig& config,
                                   const RngStream& rng) {
  require(config.s_lower < config.s_upper && config.s_lower >= 0.0 && config.s_upper <= 1.0,
          "sample-rate bounds must satisfy 0 <= lower < upper <= 1");
  const auto classes = binary_classes(train_in);
  PipelineResult out;
  auto& rep = out.report;
  rep.minority = classes.minority;
  rep.minority_name = train_in.class_names[static_cast<std::size_t>(classes.minority)];
  rep.train_rows = train_in.size();
  rep.test_rows = test_in.size();
  rep.test_row_ids = test_in.row_ids;
  std::ranges::sort(rep.test_row_ids);

  // 1. feature selection
  const auto fs = select_features(train_in, config, rng.child(stream::kForest));
  rep.importances = fs.importances;
  Dataset train = select_columns(train_in, fs.columns);
  Dataset test = select_columns(test_in, fs.columns);
  rep.selected_features = train.feature_names;

  // 2. standardization fitted on training rows only
  Scaler scaler;
  if (config.standardize) {
    scaler = fit_scaler(train.features);
  } else {
    scaler.mean.assign(train.num_features(), 0.0);
    scaler.stddev.assign(train.num_features(), 1.0);
  }
  train = scaler.transform(train);
  test = scaler.transform(test);

  // 3. minority cleansing
  Dataset cleansed = train;
  if (config.cleanse) {
    auto st = cleanse_stage(train, config);
    rep.dbscan = st.params;
    rep.restored = st.result.restored;
    for (std::size_t i : st.result.removed) {
      out.balanced.removed_row_ids.push_back(train.row_ids[i]);
      (st.labels[i].kind == PointKind::Noise ? rep.noise_removed : rep.border_removed)++;
    }
    std::ranges::sort(out.balanced.removed_row_ids);
    cleansed = std::move(st.result.dataset);
  }
  const auto cc = binary_classes(cleansed);

  // 4. sample-rate search on inner splits of the cleansed training rows
  std::vector<TrainTest> inner;
  if (config.inner_folds >= 2) {
    const std::size_t folds = std::min(config.inner_folds, cc.n_minority);
    require(folds >= 2, "too few minority rows for inner folds");
    if (folds < config.inner_folds) rep.warnings.push_back("inner folds reduced to " + std::to_string(folds));
    const auto fold = stratified_folds(cleansed.labels, cleansed.num_classes(), folds, rng.child(stream::kInnerSplit));
    for (std::size_t f = 0; f < folds; ++f) inner.push_back(fold_split(cleansed, fold, f));
  } else {
    inner.push_back(stratified_split(cleansed, {config.inner_train_fraction, true}, rng.child(stream::kInnerSplit)));
  }
  const SampleRateFitness fitness(inner, config, rng.child(stream::kFitnessSmote));
  if (fitness.smote_k() < config.smote_k) {
    rep.warnings.push_back("fitness SMOTE uses k=" + std::to_string(fitness.smote_k()) +
                           " (too few minority rows in the inner training split)");
  }
  std::set<std::size_t> touched;
  for (const auto& tt : inner) {
    touched.insert(tt.train.row_ids.begin(), tt.train.row_ids.end());
    touched.insert(tt.test.row_ids.begin(), tt.test.row_ids.end());
  }
  rep.fitness_row_ids.assign(touched.begin(), touched.end());

  HhoParams hp;
  hp.population = config.population;
  hp.iterations = config.iterations;
  hp.lb = {config.s_lower};
  hp.ub = {config.s_upper};
  hp.beta = config.beta;
  hp.literal_hard_besiege = config.literal_hard_besiege;
  hp.literal_levy = config.literal_levy;
  hp.patience = config.patience;
  hp.threads = config.threads;
  rep.trace = hho_optimize(fitness, hp, rng.child(stream::kHho));
  rep.s_star = rep.trace.best[0];
  rep.best_fitness = rep.trace.best_value;

  // 5. final oversampling of the full cleansed training set at s*
  rep.smote_k = usable_smote_k(config.smote_k, cc.n_minority);
  if (rep.smote_k < config.smote_k) {
    rep.warnings.push_back("final SMOTE uses k=" + std::to_string(rep.smote_k));
  }
  const auto min_idx = indices_of_class(cleansed.labels, cc.minority);
  const SmoteParams sp{rep.s_star, rep.smote_k, synthetic_target(rep.s_star, cc.n_majority - cc.n_minority, config.amount),
                       config.uniform_gap};
  const auto synth = smote(cleansed.features.select_rows(min_idx), sp, rng.child(stream::kFinalSmote));
  rep.synthetic = synth.rows.rows();

  // 6. merge
  Dataset merged = cleansed;
  for (std::size_t i = 0; i < synth.rows.rows(); ++i) {
    merged.features.append_row(synth.rows.row(i));
    merged.labels.push_back(cc.minority);
    merged.row_ids.push_back(kSyntheticRow);
  }

  // 7. held-out evaluation
  const auto ev = evaluate_knn(merged, test, config.knn_k, cc.minority);
  rep.metrics = ev.metrics;
  rep.roc_auc = ev.roc_auc;

  out.balanced.dataset = merged;
  out.balanced.dataset.features = scaler.inverse_transform(merged.features);
  out.balanced.synthetic.assign(merged.size(), false);
  std::fill(out.balanced.synthetic.begin() + static_cast<std::ptrdiff_t>(cleansed.size()), out.balanced.synthetic.end(),
            true);
  out.balanced.s_star = rep.s_star;
  return out;
}

/// Outer stratified split followed by run_pipeline.
inline PipelineResult ihho_smote(const Dataset& raw, const PipelineConfig& config, const RngStream& rng) {
  binary_classes(raw);
  const auto split = stratified_split(raw, config.split, rng.child(stream::kSplit));
  return run_pipeline(split.train, split.test, config, rng);
}

}  // namespace ihho
