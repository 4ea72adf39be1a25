#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ihho/metrics.hpp"

namespace ihho {

/// One (dataset, method, repeat[, fold]) evaluation, or the error that
/// stopped it.
struct RunReport {
  std::string dataset;
  std::string hash;
  std::string method;
  std::uint64_t seed = 0;
  std::size_t repeat = 0;
  std::size_t fold = 0;
  /// "cleansed" or "raw" in before/after runs, empty otherwise.
  std::string stage;
  std::string config;
  std::optional<Scores> metrics;
  double roc_auc = 0.0;
  std::optional<double> s_star;
  std::optional<std::size_t> removed;
  std::optional<std::size_t> subsampled_majority;
  std::vector<std::string> warnings;
  std::optional<std::string> error;
  double wall_ms = 0.0;
};

/// Rounds to 6 significant digits.
inline double round6(double v) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::strtod(buf, nullptr);
}

inline nlohmann::json metrics_json(const Scores& s, double roc) {
  return {{"accuracy", round6(s.accuracy)},     {"precision", round6(s.precision)}, {"recall", round6(s.recall)},
          {"specificity", round6(s.specificity)}, {"f1", round6(s.f1)},             {"gmean", round6(s.gmean)},
          {"auc_point", round6(s.auc_point)},     {"roc_auc", round6(roc)}};
}

inline nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j;
  j["dataset"] = r.dataset;
  j["hash"] = r.hash;
  j["method"] = r.method;
  j["seed"] = r.seed;
  j["repeat"] = r.repeat;
  j["fold"] = r.fold;
  if (!r.stage.empty()) j["stage"] = r.stage;
  j["config"] = r.config;
  if (r.metrics) j["metrics"] = metrics_json(*r.metrics, r.roc_auc);
  if (r.s_star) j["s_star"] = round6(*r.s_star);
  if (r.removed) j["removed"] = *r.removed;
  if (r.subsampled_majority) j["subsampled_majority"] = *r.subsampled_majority;
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  if (r.error) j["error"] = *r.error;
  j["wall_ms"] = round6(r.wall_ms);
  return j;
}

/// Sorted keys (nlohmann's default object is ordered by key), two-space
/// indent, trailing newline.
inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"accuracy", "precision", "recall",    "specificity",
                                              "f1",       "gmean",     "auc_point", "roc_auc"};
  return names;
}

/// Metric by name; roc_auc comes from the separate field.
inline double metric_by_name(const Scores& s, double roc, const std::string& name) {
  if (name == "accuracy") return s.accuracy;
  if (name == "precision") return s.precision;
  if (name == "recall") return s.recall;
  if (name == "specificity") return s.specificity;
  if (name == "f1") return s.f1;
  if (name == "gmean") return s.gmean;
  if (name == "auc_point") return s.auc_point;
  if (name == "roc_auc") return roc;
  throw Error(ErrorKind::InvalidArgument, "unknown metric '" + name + "'");
}

/// Fixed-width text of a report value for CSV tables.
inline std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", round6(v));
  return buf;
}

}  // namespace ihho
