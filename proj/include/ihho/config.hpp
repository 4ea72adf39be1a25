#pragma once

#include <charconv>
#include <cmath>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ihho/ingest.hpp"
#include "ihho/pipeline.hpp"

namespace ihho {

enum class BaselineWiring { Raw, Cleansed };

inline const char* to_string(BaselineWiring w) { return w == BaselineWiring::Raw ? "raw" : "cleansed"; }

struct BenchConfig {
  std::vector<std::string> methods{"none", "smote", "borderline1", "borderline2", "adasyn", "random_smote", "ihho_smote"};
  std::size_t repeats = 5;
  /// 0 = repeated stratified hold-out, >= 2 = stratified k-fold per repeat.
  std::size_t folds = 0;
  /// Whether baseline resamplers see the DBSCAN-cleansed training set in the
  /// before/after comparison.
  BaselineWiring baseline_wiring = BaselineWiring::Cleansed;
  /// Majority rows kept for registry entries marked `large`; 0 keeps all.
  std::size_t majority_cap = 30000;
  bool timing = false;
};

struct Config {
  std::uint64_t seed = 42;
  PipelineConfig pipeline;
  /// Whole-set neighbors for the borderline and ADASYN baselines.
  std::size_t danger_m = 5;
  BenchConfig bench;

  ResampleOptions resample_options() const { return {pipeline.smote_k, danger_m}; }
};

namespace detail {

inline std::string fmt_double(double v) { return format_exact(v); }

struct ConfigKey {
  const char* section;
  const char* key;
  std::function<std::string(const Config&)> get;
  /// Returns an error message, empty on success.
  std::function<std::string(Config&, std::string_view)> set;
};

inline std::string parse_into(std::string_view v, double& out) {
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc{} || r.ptr != v.data() + v.size() || !std::isfinite(out)) return "expected a number";
  return {};
}

inline std::string parse_into(std::string_view v, std::uint64_t& out) {
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc{} || r.ptr != v.data() + v.size()) return "expected a non-negative integer";
  return {};
}

inline std::string parse_into(std::string_view v, bool& out) {
  if (v == "true") out = true;
  else if (v == "false") out = false;
  else return "expected true or false";
  return {};
}

template <class T>
ConfigKey field(const char* section, const char* key, T Config::*group, auto member) {
  return {section, key,
          [=](const Config& c) {
            const auto& x = (c.*group).*member;
            if constexpr (std::is_same_v<std::decay_t<decltype(x)>, bool>) return std::string(x ? "true" : "false");
            else if constexpr (std::is_floating_point_v<std::decay_t<decltype(x)>>) return fmt_double(x);
            else return std::to_string(x);
          },
          [=](Config& c, std::string_view v) { return parse_into(v, (c.*group).*member); }};
}

inline const std::vector<ConfigKey>& config_keys() {
  using P = PipelineConfig;
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    auto pf = [&](const char* s, const char* n, auto m) { k.push_back(field(s, n, &Config::pipeline, m)); };
    auto bf = [&](const char* s, const char* n, auto m) { k.push_back(field(s, n, &Config::bench, m)); };

    k.push_back({"core", "seed", [](const Config& c) { return std::to_string(c.seed); },
                 [](Config& c, std::string_view v) { return parse_into(v, c.seed); }});
    k.push_back({"core", "train_fraction", [](const Config& c) { return fmt_double(c.pipeline.split.train_fraction); },
                 [](Config& c, std::string_view v) { return parse_into(v, c.pipeline.split.train_fraction); }});
    k.push_back({"core", "stratified", [](const Config& c) { return std::string(c.pipeline.split.stratified ? "true" : "false"); },
                 [](Config& c, std::string_view v) { return parse_into(v, c.pipeline.split.stratified); }});
    pf("core", "standardize", &P::standardize);

    pf("forest", "fn", &P::fn);
    k.push_back({"forest", "trees", [](const Config& c) { return std::to_string(c.pipeline.forest.n_trees); },
                 [](Config& c, std::string_view v) { return parse_into(v, c.pipeline.forest.n_trees); }});
    k.push_back({"forest", "m_features", [](const Config& c) { return std::to_string(c.pipeline.forest.m_features); },
                 [](Config& c, std::string_view v) { return parse_into(v, c.pipeline.forest.m_features); }});
    k.push_back({"forest", "max_depth", [](const Config& c) { return std::to_string(c.pipeline.forest.max_depth); },
                 [](Config& c, std::string_view v) { return parse_into(v, c.pipeline.forest.max_depth); }});
    k.push_back({"forest", "min_leaf", [](const Config& c) { return std::to_string(c.pipeline.forest.min_leaf); },
                 [](Config& c, std::string_view v) { return parse_into(v, c.pipeline.forest.min_leaf); }});

    pf("cluster", "enabled", &P::cleanse);
    k.push_back({"cluster", "epsilon",
                 [](const Config& c) { return c.pipeline.epsilon ? fmt_double(*c.pipeline.epsilon) : std::string("auto"); },
                 [](Config& c, std::string_view v) -> std::string {
                   if (v == "auto") {
                     c.pipeline.epsilon.reset();
                     return {};
                   }
                   double x = 0;
                   if (auto e = parse_into(v, x); !e.empty()) return e;
                   if (x <= 0) return "epsilon must be positive";
                   c.pipeline.epsilon = x;
                   return {};
                 }});
    k.push_back({"cluster", "min_pts",
                 [](const Config& c) { return c.pipeline.min_pts ? std::to_string(*c.pipeline.min_pts) : std::string("auto"); },
                 [](Config& c, std::string_view v) -> std::string {
                   if (v == "auto") {
                     c.pipeline.min_pts.reset();
                     return {};
                   }
                   std::size_t x = 0;
                   if (auto e = parse_into(v, x); !e.empty()) return e;
                   if (x == 0) return "min_pts must be at least 1";
                   c.pipeline.min_pts = x;
                   return {};
                 }});
    pf("cluster", "eps_quantile", &P::eps_quantile);
    k.push_back({"cluster", "scope", [](const Config& c) { return std::string(to_string(c.pipeline.dbscan_scope)); },
                 [](Config& c, std::string_view v) -> std::string {
                   if (v == "global") c.pipeline.dbscan_scope = DbscanScope::Global;
                   else if (v == "minority") c.pipeline.dbscan_scope = DbscanScope::Minority;
                   else return "expected global or minority";
                   return {};
                 }});
    k.push_back({"cluster", "remove_border",
                 [](const Config& c) { return std::string(c.pipeline.cleanse_policy.remove_border ? "true" : "false"); },
                 [](Config& c, std::string_view v) { return parse_into(v, c.pipeline.cleanse_policy.remove_border); }});
    k.push_back({"cluster", "min_keep", [](const Config& c) { return std::to_string(c.pipeline.cleanse_policy.min_keep); },
                 [](Config& c, std::string_view v) { return parse_into(v, c.pipeline.cleanse_policy.min_keep); }});

    pf("hho", "population", &P::population);
    pf("hho", "iterations", &P::iterations);
    pf("hho", "s_lower", &P::s_lower);
    pf("hho", "s_upper", &P::s_upper);
    pf("hho", "beta", &P::beta);
    pf("hho", "literal_hard_besiege", &P::literal_hard_besiege);
    pf("hho", "literal_levy", &P::literal_levy);
    pf("hho", "patience", &P::patience);

    pf("resample", "k", &P::smote_k);
    k.push_back({"resample", "m", [](const Config& c) { return std::to_string(c.danger_m); },
                 [](Config& c, std::string_view v) { return parse_into(v, c.danger_m); }});
    k.push_back({"resample", "amount", [](const Config& c) { return std::string(to_string(c.pipeline.amount)); },
                 [](Config& c, std::string_view v) -> std::string {
                   if (v == "rate") c.pipeline.amount = AmountMode::Rate;
                   else if (v == "balance") c.pipeline.amount = AmountMode::Balance;
                   else return "expected rate or balance";
                   return {};
                 }});
    pf("resample", "uniform_gap", &P::uniform_gap);

    pf("pipeline", "knn_k", &P::knn_k);
    k.push_back({"pipeline", "metric", [](const Config& c) { return std::string(to_string(c.pipeline.metric)); },
                 [](Config& c, std::string_view v) -> std::string {
                   if (v == "gmean") c.pipeline.metric = FitnessMetric::GMean;
                   else if (v == "accuracy") c.pipeline.metric = FitnessMetric::Accuracy;
                   else if (v == "f1") c.pipeline.metric = FitnessMetric::F1;
                   else return "expected gmean, accuracy or f1";
                   return {};
                 }});
    pf("pipeline", "inner_train_fraction", &P::inner_train_fraction);
    pf("pipeline", "inner_folds", &P::inner_folds);

    k.push_back({"bench", "methods",
                 [](const Config& c) {
                   std::string s;
                   for (const auto& m : c.bench.methods) s += (s.empty() ? "" : ",") + m;
                   return s;
                 },
                 [](Config& c, std::string_view v) -> std::string {
                   std::vector<std::string> out;
                   while (!v.empty()) {
                     const auto comma = v.find(',');
                     const auto item = detail::trim(v.substr(0, comma));
                     if (item != "ihho_smote") {
                       try {
                         resampler_from_string(std::string(item));
                       } catch (const Error&) {
                         return "unknown method '" + std::string(item) + "'";
                       }
                     }
                     out.emplace_back(item);
                     v = comma == std::string_view::npos ? std::string_view{} : v.substr(comma + 1);
                   }
                   if (out.empty()) return "methods must not be empty";
                   c.bench.methods = std::move(out);
                   return {};
                 }});
    bf("bench", "repeats", &BenchConfig::repeats);
    bf("bench", "folds", &BenchConfig::folds);
    k.push_back({"bench", "baseline_wiring", [](const Config& c) { return std::string(to_string(c.bench.baseline_wiring)); },
                 [](Config& c, std::string_view v) -> std::string {
                   if (v == "raw") c.bench.baseline_wiring = BaselineWiring::Raw;
                   else if (v == "cleansed") c.bench.baseline_wiring = BaselineWiring::Cleansed;
                   else return "expected raw or cleansed";
                   return {};
                 }});
    bf("bench", "majority_cap", &BenchConfig::majority_cap);
    bf("bench", "timing", &BenchConfig::timing);
    return k;
  }();
  return keys;
}

}  // namespace detail

/// Canonical text form: every key, sections in fixed order, doubles in
/// shortest round-trip form so parse_config(to_ini(c)) == c exactly.
inline std::string to_ini(const Config& c) {
  std::string out;
  std::string_view section;
  for (const auto& k : detail::config_keys()) {
    if (section != k.section) {
      if (!section.empty()) out += '\n';
      section = k.section;
      out += "[" + std::string(section) + "]\n";
    }
    out += std::string(k.key) + " = " + k.get(c) + "\n";
  }
  return out;
}

/// Parses `[section]` headers and `key = value` lines on top of the defaults.
/// `#` and `;` start comment lines. Unknown sections and keys are errors.
inline Config parse_config(std::string_view text, Config base = {}) {
  std::string section;
  for (const auto& [line_no, raw] : detail::lines_of(text)) {
    const auto line = detail::trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "1", "unterminated section header");
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      bool known = false;
      for (const auto& k : detail::config_keys()) known = known || section == k.section;
      if (!known) throw ParseError(line_no, "1", "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "1", "expected key = value");
    if (section.empty()) throw ParseError(line_no, "1", "key outside of any section");
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    const detail::ConfigKey* entry = nullptr;
    for (const auto& k : detail::config_keys()) {
      if (section == k.section && key == k.key) entry = &k;
    }
    if (!entry) throw ParseError(line_no, "1", "unknown key '" + std::string(key) + "' in [" + section + "]");
    if (auto err = entry->set(base, value); !err.empty()) {
      throw ParseError(line_no, std::to_string(eq + 2), std::string(key) + ": " + err);
    }
  }
  return base;
}

}  // namespace ihho
