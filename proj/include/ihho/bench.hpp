#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ihho/config.hpp"
#include "ihho/ingest.hpp"
#include "ihho/pipeline.hpp"
#include "ihho/report.hpp"
#include "ihho/resample.hpp"

namespace ihho {

struct RegistryEntry {
  std::string id;
  std::filesystem::path path;
  SourceFormat format;
  /// Majority class is capped at BenchConfig::majority_cap unless full runs
  /// are requested.
  bool large = false;
};

/// One dataset per line: `id path [key=value ...]`. Keys: format=csv|keel,
/// label=<column name or 0-based index> (CSV), ordinal_nominal=true|false,
/// large=true|false. Relative paths resolve against `base_dir`. Blank lines
/// and lines starting with `#` are skipped.
inline std::vector<RegistryEntry> parse_registry(std::string_view text, const std::filesystem::path& base_dir = {}) {
  std::vector<RegistryEntry> out;
  for (const auto& [line_no, raw] : detail::lines_of(text)) {
    const auto line = detail::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string_view> words;
    for (std::size_t pos = 0; pos < line.size();) {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      const std::size_t start = pos;
      while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      if (pos > start) words.push_back(line.substr(start, pos - start));
    }
    if (words.size() < 2) throw ParseError(line_no, "1", "expected `id path [key=value ...]`");
    RegistryEntry e;
    e.id = words[0];
    e.path = std::filesystem::path(std::string(words[1]));
    if (e.path.is_relative()) e.path = base_dir / e.path;
    e.format.kind = infer_format(e.path);
    for (std::size_t w = 2; w < words.size(); ++w) {
      const auto eq = words[w].find('=');
      if (eq == std::string_view::npos) throw ParseError(line_no, std::to_string(w + 1), "expected key=value");
      const auto key = words[w].substr(0, eq);
      const auto value = words[w].substr(eq + 1);
      auto flag = [&] {
        if (value != "true" && value != "false") throw ParseError(line_no, std::string(key), "expected true or false");
        return value == "true";
      };
      if (key == "format") {
        if (value == "csv") e.format.kind = FormatKind::Csv;
        else if (value == "keel") e.format.kind = FormatKind::Keel;
        else throw ParseError(line_no, "format", "expected csv or keel");
      } else if (key == "label") {
        std::size_t idx = 0;
        const auto r = std::from_chars(value.data(), value.data() + value.size(), idx);
        if (r.ec == std::errc{} && r.ptr == value.data() + value.size()) e.format.label_column = idx;
        else e.format.label_column = std::string(value);
      } else if (key == "ordinal_nominal") {
        e.format.ordinal_nominal_inputs = flag();
      } else if (key == "large") {
        e.large = flag();
      } else {
        throw ParseError(line_no, std::string(key), "unknown registry key");
      }
    }
    for (const auto& prev : out) {
      if (prev.id == e.id) throw ParseError(line_no, "1", "duplicate dataset id '" + e.id + "'");
    }
    out.push_back(std::move(e));
  }
  return out;
}

inline std::vector<RegistryEntry> load_registry(const std::filesystem::path& file) {
  return parse_registry(read_file(file), file.parent_path());
}

/// Keeps all minority rows and `cap` majority rows chosen by `rng`, in
/// original row order.
inline Dataset subsample_majority(const Dataset& d, std::size_t cap, RngStream rng) {
  const auto bc = binary_classes(d);
  auto maj = indices_of_class(d.labels, bc.majority);
  if (maj.size() <= cap) return d;
  shuffle(maj, rng);
  maj.resize(cap);
  auto keep = indices_of_class(d.labels, bc.minority);
  keep.insert(keep.end(), maj.begin(), maj.end());
  std::ranges::sort(keep);
  return subset(d, keep);
}

/// Stream of one (dataset, repeat): independent of registry order and of the
/// method list.
inline RngStream repeat_stream(std::uint64_t seed, const std::string& dataset, std::size_t repeat) {
  return RngStream(seed, 0).child(fnv1a(dataset), repeat);
}

inline bool is_ihho(const std::string& method) { return method == "ihho_smote"; }

/// Baseline cell: optional forest selection (only when fn > 0), train-fitted
/// standardization, optional DBSCAN cleansing, resampling up to class balance
/// with the classic uniform gap, KNN evaluation on `test`.
inline void run_baseline(const std::string& method, const Dataset& train_in, const Dataset& test_in, const Config& cfg,
                         bool cleanse, const RngStream& rng, RunReport& rep) {
  const auto& pc = cfg.pipeline;
  Dataset train = train_in, test = test_in;
  if (pc.fn > 0) {
    const auto fs = select_features(train, pc, rng.child(stream::kForest));
    train = select_columns(train, fs.columns);
    test = select_columns(test, fs.columns);
  }
  if (pc.standardize) {
    const auto sc = fit_scaler(train.features);
    train = sc.transform(train);
    test = sc.transform(test);
  }
  std::size_t removed = 0;
  if (cleanse) {
    auto st = cleanse_stage(train, pc);
    removed = st.result.removed.size();
    train = std::move(st.result.dataset);
  }
  const auto bc = binary_classes(train);
  const auto kind = resampler_from_string(method);
  auto opt = cfg.resample_options();
  if (kind != ResamplerKind::None) {
    opt.k = usable_smote_k(opt.k, bc.n_minority);
    if (opt.k < pc.smote_k) rep.warnings.push_back("SMOTE uses k=" + std::to_string(opt.k));
  }
  const auto res = resample(kind, train, bc.n_majority - bc.n_minority, rng.child(stream::kResample), opt);
  rep.warnings.insert(rep.warnings.end(), res.warnings.begin(), res.warnings.end());
  const auto ev = evaluate_knn(res.dataset, test, pc.knn_k, bc.minority);
  rep.metrics = ev.metrics;
  rep.roc_auc = ev.roc_auc;
  if (cleanse) rep.removed = removed;
}

inline void run_ihho(const Dataset& train, const Dataset& test, const Config& cfg, bool cleanse, const RngStream& rng,
                     RunReport& rep) {
  auto pc = cfg.pipeline;
  pc.cleanse = cleanse;
  pc.threads = 1;
  const auto res = run_pipeline(train, test, pc, rng);
  rep.metrics = res.report.metrics;
  rep.roc_auc = res.report.roc_auc;
  rep.s_star = res.report.s_star;
  rep.removed = res.balanced.removed_row_ids.size();
  rep.warnings.insert(rep.warnings.end(), res.report.warnings.begin(), res.report.warnings.end());
}

struct AggregateRow {
  std::string dataset;
  std::string method;
  std::string stage;
  std::size_t runs = 0;
  std::size_t errors = 0;
  std::map<std::string, double> mean;
  std::map<std::string, double> stddev;
};

struct BenchResult {
  std::vector<RunReport> reports;
  std::vector<AggregateRow> aggregates;
};

/// Mean and sample standard deviation of every metric per (dataset, method,
/// stage), over the cells that finished without error.
inline std::vector<AggregateRow> aggregate(std::span<const RunReport> reports) {
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<const RunReport*>> groups;
  for (const auto& r : reports) groups[{r.dataset, r.method, r.stage}].push_back(&r);
  std::vector<AggregateRow> out;
  for (const auto& [key, rs] : groups) {
    AggregateRow row;
    std::tie(row.dataset, row.method, row.stage) = key;
    std::vector<const RunReport*> ok;
    for (const auto* r : rs) (r->metrics ? ok.push_back(r) : void(++row.errors));
    row.runs = ok.size();
    for (const auto& name : metric_names()) {
      double sum = 0.0;
      for (const auto* r : ok) sum += metric_by_name(*r->metrics, r->roc_auc, name);
      const double mean = ok.empty() ? 0.0 : sum / static_cast<double>(ok.size());
      double ss = 0.0;
      for (const auto* r : ok) ss += std::pow(metric_by_name(*r->metrics, r->roc_auc, name) - mean, 2);
      row.mean[name] = mean;
      row.stddev[name] = ok.size() > 1 ? std::sqrt(ss / static_cast<double>(ok.size() - 1)) : 0.0;
    }
    out.push_back(std::move(row));
  }
  return out;
}

namespace detail {

struct Cell {
  std::size_t dataset;
  std::size_t repeat;
  std::size_t fold;
  std::string method;
  std::string stage;
};

struct LoadedEntry {
  std::optional<Dataset> data;
  std::string hash;
  std::optional<std::size_t> subsampled;
  std::string error;
};

inline LoadedEntry load_entry(const RegistryEntry& e, const Config& cfg, bool full) {
  LoadedEntry le;
  try {
    auto loaded = load_dataset(e.path, e.format);
    le.hash = loaded.hash;
    binary_classes(loaded.dataset);
    if (e.large && !full && cfg.bench.majority_cap > 0) {
      const auto bc = binary_classes(loaded.dataset);
      if (bc.n_majority > cfg.bench.majority_cap) {
        loaded.dataset = subsample_majority(loaded.dataset, cfg.bench.majority_cap,
                                            RngStream(cfg.seed, 0).child(fnv1a(e.id), ~std::uint64_t{0}));
        le.subsampled = cfg.bench.majority_cap;
      }
    }
    le.data = std::move(loaded.dataset);
  } catch (const std::exception& ex) {
    le.error = ex.what();
  }
  return le;
}

/// Train/test pair for a cell: the (dataset, repeat) split, or fold `fold`
/// of a stratified k-fold partition when folds >= 2.
inline TrainTest cell_split(const Dataset& d, const Config& cfg, const RngStream& rep_rng, std::size_t fold) {
  if (cfg.bench.folds >= 2) {
    const auto f = stratified_folds(d.labels, d.num_classes(), cfg.bench.folds, rep_rng.child(stream::kSplit));
    return fold_split(d, f, fold);
  }
  return stratified_split(d, cfg.pipeline.split, rep_rng.child(stream::kSplit));
}

inline std::vector<RunReport> run_cells(std::span<const RegistryEntry> registry, std::span<const Cell> cells,
                                        const Config& cfg, bool full, std::size_t threads) {
  std::vector<LoadedEntry> loaded;
  for (const auto& e : registry) loaded.push_back(load_entry(e, cfg, full));
  const std::string config_text = to_ini(cfg);

  std::vector<RunReport> reports(cells.size());
  parallel_for(cells.size(), threads, [&](std::size_t c) {
    const auto& cell = cells[c];
    const auto& entry = registry[cell.dataset];
    const auto& le = loaded[cell.dataset];
    RunReport& rep = reports[c];
    rep.dataset = entry.id;
    rep.hash = le.hash;
    rep.method = cell.method;
    rep.seed = cfg.seed;
    rep.repeat = cell.repeat;
    rep.fold = cell.fold;
    rep.stage = cell.stage;
    rep.config = config_text;
    rep.subsampled_majority = le.subsampled;
    if (!le.data) {
      rep.error = le.error;
      return;
    }
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto rep_rng = repeat_stream(cfg.seed, entry.id, cell.repeat);
      const auto tt = cell_split(*le.data, cfg, rep_rng, cell.fold);
      const auto rng = rep_rng.child(fnv1a(cell.method), cell.fold);
      const bool cleanse = cell.stage.empty() ? cfg.pipeline.cleanse : cell.stage == "cleansed";
      if (is_ihho(cell.method)) {
        run_ihho(tt.train, tt.test, cfg, cleanse, rng, rep);
      } else {
        const bool baseline_cleanse = cell.stage == "cleansed" && cell.method != "none" &&
                                      cfg.bench.baseline_wiring == BaselineWiring::Cleansed;
        run_baseline(cell.method, tt.train, tt.test, cfg, baseline_cleanse, rng, rep);
      }
    } catch (const std::exception& ex) {
      rep.metrics.reset();
      rep.error = ex.what();
    }
    if (cfg.bench.timing) {
      rep.wall_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
  });
  return reports;
}

inline std::size_t folds_per_repeat(const Config& cfg) { return cfg.bench.folds >= 2 ? cfg.bench.folds : 1; }

}  // namespace detail

/// Every (dataset, method, repeat[, fold]) cell; cell streams derive from
/// (seed, dataset id, repeat, method, fold), so the result does not depend
/// on `threads` or on the order of the registry. Failures are recorded in
/// the cell's report.
inline BenchResult run_bench(std::span<const RegistryEntry> registry, const Config& cfg, bool full = false,
                             std::size_t threads = 1) {
  require(cfg.bench.repeats >= 1, "repeats must be positive");
  std::vector<detail::Cell> cells;
  for (std::size_t d = 0; d < registry.size(); ++d) {
    for (std::size_t r = 0; r < cfg.bench.repeats; ++r) {
      for (std::size_t f = 0; f < detail::folds_per_repeat(cfg); ++f) {
        for (const auto& m : cfg.bench.methods) cells.push_back({d, r, f, m, ""});
      }
    }
  }
  BenchResult out;
  out.reports = detail::run_cells(registry, cells, cfg, full, threads);
  out.aggregates = aggregate(out.reports);
  return out;
}

struct DeltaRow {
  std::string dataset;
  std::string method;
  std::string metric;
  double before = 0.0;
  double after = 0.0;
  double delta = 0.0;
};

struct BeforeAfterResult {
  std::vector<RunReport> reports;
  std::vector<AggregateRow> aggregates;
  std::vector<DeltaRow> deltas;
};

/// Each cell runs twice on the same split and streams: stage "raw" without
/// DBSCAN cleansing and stage "cleansed" with it. Baselines see cleansed
/// training data only under BaselineWiring::Cleansed; `none` never does.
/// Deltas are after - before of the per-stage means.
inline BeforeAfterResult before_after_cleansing(std::span<const RegistryEntry> registry, const Config& cfg,
                                                bool full = false, std::size_t threads = 1) {
  require(cfg.bench.repeats >= 1, "repeats must be positive");
  std::vector<detail::Cell> cells;
  for (std::size_t d = 0; d < registry.size(); ++d) {
    for (std::size_t r = 0; r < cfg.bench.repeats; ++r) {
      for (std::size_t f = 0; f < detail::folds_per_repeat(cfg); ++f) {
        for (const auto& m : cfg.bench.methods) {
          cells.push_back({d, r, f, m, "raw"});
          cells.push_back({d, r, f, m, "cleansed"});
        }
      }
    }
  }
  BeforeAfterResult out;
  out.reports = detail::run_cells(registry, cells, cfg, full, threads);
  out.aggregates = aggregate(out.reports);
  std::map<std::pair<std::string, std::string>, std::pair<const AggregateRow*, const AggregateRow*>> pairs;
  for (const auto& a : out.aggregates) {
    auto& p = pairs[{a.dataset, a.method}];
    (a.stage == "raw" ? p.first : p.second) = &a;
  }
  for (const auto& [key, p] : pairs) {
    for (const auto& name : metric_names()) {
      DeltaRow row;
      row.dataset = key.first;
      row.method = key.second;
      row.metric = name;
      row.before = p.first->mean.at(name);
      row.after = p.second->mean.at(name);
      row.delta = row.after - row.before;
      out.deltas.push_back(row);
    }
  }
  return out;
}

inline nlohmann::json to_json(const AggregateRow& a) {
  nlohmann::json j{{"dataset", a.dataset}, {"method", a.method}, {"runs", a.runs}, {"errors", a.errors}};
  if (!a.stage.empty()) j["stage"] = a.stage;
  for (const auto& [k, v] : a.mean) j["mean"][k] = round6(v);
  for (const auto& [k, v] : a.stddev) j["std"][k] = round6(v);
  return j;
}

inline nlohmann::json to_json(const DeltaRow& d) {
  return {{"dataset", d.dataset}, {"method", d.method},          {"metric", d.metric},
          {"before", round6(d.before)}, {"after", round6(d.after)}, {"delta", round6(d.after) - round6(d.before)}};
}

inline std::string reports_csv(std::span<const RunReport> reports) {
  std::string out = "dataset,method,stage,repeat,fold";
  for (const auto& m : metric_names()) out += "," + m;
  out += ",s_star,removed,error\n";
  for (const auto& r : reports) {
    out += detail::csv_field(r.dataset) + "," + r.method + "," + r.stage + "," + std::to_string(r.repeat) + "," +
           std::to_string(r.fold);
    for (const auto& m : metric_names()) out += "," + (r.metrics ? fmt6(metric_by_name(*r.metrics, r.roc_auc, m)) : "");
    out += "," + (r.s_star ? fmt6(*r.s_star) : "") + "," + (r.removed ? std::to_string(*r.removed) : "") + "," +
           detail::csv_field(r.error.value_or("")) + "\n";
  }
  return out;
}

/// "mean ± std" cells, one row per (dataset, method, stage).
inline std::string aggregates_csv(std::span<const AggregateRow> rows) {
  std::string out = "dataset,method,stage,runs,errors";
  for (const auto& m : metric_names()) out += "," + m;
  out += "\n";
  for (const auto& a : rows) {
    out += detail::csv_field(a.dataset) + "," + a.method + "," + a.stage + "," + std::to_string(a.runs) + "," +
           std::to_string(a.errors);
    for (const auto& m : metric_names()) out += "," + fmt6(a.mean.at(m)) + " ± " + fmt6(a.stddev.at(m));
    out += "\n";
  }
  return out;
}

inline std::string deltas_csv(std::span<const DeltaRow> rows) {
  std::string out = "dataset,method,metric,before,after,delta\n";
  for (const auto& d : rows) {
    out += detail::csv_field(d.dataset) + "," + d.method + "," + d.metric + "," + fmt6(d.before) + "," +
           fmt6(d.after) + "," + fmt6(round6(d.after) - round6(d.before)) + "\n";
  }
  return out;
}

}  // namespace ihho
