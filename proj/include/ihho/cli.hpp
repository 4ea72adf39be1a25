#pragma once

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>

#include "ihho/bench.hpp"
#include "ihho/config.hpp"
#include "ihho/ingest.hpp"
#include "ihho/pipeline.hpp"
#include "ihho/report.hpp"

namespace ihho::cli {

/// Process exit codes.
inline constexpr int kOk = 0;
inline constexpr int kParseError = 2;
inline constexpr int kPipelineError = 3;

enum class OutputFormat { Json, Csv };

struct Options {
  Config config;
  std::filesystem::path out = ".";
  OutputFormat format = OutputFormat::Json;
  std::size_t threads = 1;
  bool full = false;
  /// CSV label column (name or index); empty = last column.
  std::string label;
  bool ordinal_nominal = false;
};

inline SourceFormat source_format(const std::filesystem::path& input, const Options& opt) {
  SourceFormat f;
  f.kind = infer_format(input);
  f.ordinal_nominal_inputs = opt.ordinal_nominal;
  if (!opt.label.empty()) {
    std::size_t idx = 0;
    const auto r = std::from_chars(opt.label.data(), opt.label.data() + opt.label.size(), idx);
    if (r.ec == std::errc{} && r.ptr == opt.label.data() + opt.label.size()) f.label_column = idx;
    else f.label_column = opt.label;
  }
  return f;
}

/// Maps exceptions to exit codes, printing the message to `err`.
template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::Parse || e.kind() == ErrorKind::Io ? kParseError : kPipelineError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kPipelineError;
  }
}

inline nlohmann::json id_list(std::span<const std::size_t> ids) { return nlohmann::json(std::vector<std::size_t>(ids.begin(), ids.end())); }

/// Forest selection, standardization, DBSCAN and minority cleansing on the
/// whole input. Writes `<stem>.cleansed.csv` (surviving input rows, original
/// columns) and `<stem>.removal.json`.
inline int cmd_cleanse(const std::filesystem::path& input, const Options& opt, std::ostream& log = std::cout) {
  const auto loaded = load_dataset(input, source_format(input, opt));
  const auto& raw = loaded.dataset;
  const auto& pc = opt.config.pipeline;
  auto fcfg = pc;
  fcfg.threads = opt.threads;
  const auto fs = select_features(raw, fcfg, RngStream(opt.config.seed, 0).child(stream::kForest));
  Dataset sel = select_columns(raw, fs.columns);
  if (pc.standardize) sel = fit_scaler(sel.features).transform(sel);
  const auto st = cleanse_stage(sel, pc);

  std::vector<std::size_t> removed, noise, border;
  for (std::size_t i : st.result.removed) {
    removed.push_back(raw.row_ids[i]);
    (st.labels[i].kind == PointKind::Noise ? noise : border).push_back(raw.row_ids[i]);
  }
  std::vector<std::size_t> keep;
  for (std::size_t i = 0, r = 0; i < raw.size(); ++i) {
    if (r < st.result.removed.size() && st.result.removed[r] == i) {
      ++r;
      continue;
    }
    keep.push_back(i);
  }

  const auto stem = input.stem().string();
  std::filesystem::create_directories(opt.out);
  write_file(opt.out / (stem + ".cleansed.csv"), write_csv(subset(raw, keep)));
  nlohmann::json j;
  j["dataset"] = stem;
  j["hash"] = loaded.hash;
  j["seed"] = opt.config.seed;
  j["config"] = to_ini(opt.config);
  j["selected_features"] = sel.feature_names;
  j["dbscan"] = {{"epsilon", round6(st.params.epsilon)}, {"min_pts", st.params.min_pts}};
  j["removed"] = id_list(removed);
  j["noise"] = id_list(noise);
  j["border"] = id_list(border);
  j["restored"] = st.result.restored;
  const auto before = raw.class_counts();
  const auto after = st.result.dataset.class_counts();
  for (std::size_t c = 0; c < raw.num_classes(); ++c) {
    j["class_counts_before"][raw.class_names[c]] = before[c];
    j["class_counts_after"][raw.class_names[c]] = after[c];
  }
  write_file(opt.out / (stem + ".removal.json"), dump(j));
  log << stem << ": removed " << removed.size() << " minority rows (" << noise.size() << " noise, " << border.size()
      << " border), kept " << keep.size() << "\n";
  return kOk;
}

inline RunReport make_report(const std::string& dataset, const std::string& hash, const std::string& method,
                             const Config& cfg) {
  RunReport r;
  r.dataset = dataset;
  r.hash = hash;
  r.method = method;
  r.seed = cfg.seed;
  r.config = to_ini(cfg);
  return r;
}

/// Full pipeline on one file. Writes `<stem>.balanced.csv` (selected
/// features in input units, class, origin = original|synthetic) and
/// `<stem>.report.json` or `.report.csv`.
inline int cmd_run(const std::filesystem::path& input, const Options& opt, std::ostream& log = std::cout) {
  const auto loaded = load_dataset(input, source_format(input, opt));
  auto pc = opt.config.pipeline;
  pc.threads = opt.threads;
  const auto start = std::chrono::steady_clock::now();
  const auto res = ihho_smote(loaded.dataset, pc, RngStream(opt.config.seed, 0));
  const auto stem = input.stem().string();

  auto rep = make_report(stem, loaded.hash, "ihho_smote", opt.config);
  rep.metrics = res.report.metrics;
  rep.roc_auc = res.report.roc_auc;
  rep.s_star = res.report.s_star;
  rep.removed = res.balanced.removed_row_ids.size();
  rep.warnings = res.report.warnings;
  if (opt.config.bench.timing) {
    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }

  std::vector<std::string> origin;
  for (bool s : res.balanced.synthetic) origin.emplace_back(s ? "synthetic" : "original");
  std::filesystem::create_directories(opt.out);
  write_file(opt.out / (stem + ".balanced.csv"), write_csv(res.balanced.dataset, "origin", origin));
  if (opt.format == OutputFormat::Json) {
    auto j = to_json(rep);
    j["removed_rows"] = id_list(res.balanced.removed_row_ids);
    j["selected_features"] = res.report.selected_features;
    j["synthetic"] = res.report.synthetic;
    write_file(opt.out / (stem + ".report.json"), dump(j));
  } else {
    write_file(opt.out / (stem + ".report.csv"), reports_csv(std::span(&rep, 1)));
  }
  log << stem << ": s*=" << fmt6(rep.s_star.value_or(0)) << " removed=" << *rep.removed
      << " synthetic=" << res.report.synthetic << " gmean=" << fmt6(rep.metrics->gmean)
      << " f1=" << fmt6(rep.metrics->f1) << " auc=" << fmt6(rep.metrics->auc_point) << "\n";
  return kOk;
}

/// run_bench (or before_after_cleansing) over a registry file. Cell failures
/// are recorded in the reports and do not change the exit code.
inline int cmd_bench(const std::filesystem::path& registry_file, const Options& opt, bool before_after,
                     std::ostream& log = std::cout) {
  const auto registry = load_registry(registry_file);
  std::filesystem::create_directories(opt.out);
  const std::string prefix = before_after ? "before_after" : "bench";
  std::span<const AggregateRow> aggregates;
  BenchResult bench;
  BeforeAfterResult ba;
  std::span<const RunReport> reports;
  if (before_after) {
    ba = before_after_cleansing(registry, opt.config, opt.full, opt.threads);
    reports = ba.reports;
    aggregates = ba.aggregates;
  } else {
    bench = run_bench(registry, opt.config, opt.full, opt.threads);
    reports = bench.reports;
    aggregates = bench.aggregates;
  }

  if (opt.format == OutputFormat::Json) {
    nlohmann::json j;
    j["reports"] = nlohmann::json::array();
    for (const auto& r : reports) j["reports"].push_back(to_json(r));
    j["aggregates"] = nlohmann::json::array();
    for (const auto& a : aggregates) j["aggregates"].push_back(to_json(a));
    if (before_after) {
      j["baseline_wiring"] = to_string(opt.config.bench.baseline_wiring);
      j["deltas"] = nlohmann::json::array();
      for (const auto& d : ba.deltas) j["deltas"].push_back(to_json(d));
    }
    write_file(opt.out / (prefix + ".json"), dump(j));
  } else {
    write_file(opt.out / (prefix + "_reports.csv"), reports_csv(reports));
    write_file(opt.out / (prefix + "_summary.csv"), aggregates_csv(aggregates));
    if (before_after) write_file(opt.out / (prefix + "_deltas.csv"), deltas_csv(ba.deltas));
  }

  std::size_t errors = 0;
  for (const auto& r : reports) errors += r.error ? 1 : 0;
  for (const auto& a : aggregates) {
    log << a.dataset << " " << a.method << (a.stage.empty() ? "" : " [" + a.stage + "]")
        << " gmean=" << fmt6(a.mean.at("gmean")) << "±" << fmt6(a.stddev.at("gmean"))
        << " f1=" << fmt6(a.mean.at("f1")) << " auc=" << fmt6(a.mean.at("auc_point"));
    if (a.errors) log << " errors=" << a.errors;
    log << "\n";
  }
  log << reports.size() << " cells, " << errors << " errors\n";
  return kOk;
}

/// Scores a predictions CSV with columns `truth`, `prediction` and an
/// optional `score` (higher = more positive). The positive class defaults to
/// the rarer truth value.
inline int cmd_metrics(const std::filesystem::path& input, const std::string& positive_name, const Options& opt,
                       std::ostream& out = std::cout) {
  const auto text = read_file(input);
  const auto lines = detail::lines_of(text);
  std::vector<std::string> header;
  std::size_t ti = 0, pi = 0, si = 0;
  bool have_t = false, have_p = false, have_s = false;
  std::vector<std::string> truth, pred;
  std::vector<double> score_col;
  for (const auto& [no, line] : lines) {
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_fields(line, no);
    if (header.empty()) {
      header = fields;
      for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "truth") ti = c, have_t = true;
        if (header[c] == "prediction") pi = c, have_p = true;
        if (header[c] == "score") si = c, have_s = true;
      }
      if (!have_t || !have_p) throw ParseError(no, "truth", "header needs `truth` and `prediction` columns");
      continue;
    }
    if (fields.size() != header.size()) throw ParseError(no, "", "expected " + std::to_string(header.size()) + " fields");
    truth.push_back(fields[ti]);
    pred.push_back(fields[pi]);
    if (have_s) score_col.push_back(detail::parse_number(fields[si], no, "score"));
  }
  if (truth.empty()) throw ParseError(1, "", "no prediction rows");

  std::string positive = positive_name;
  if (positive.empty()) {
    std::map<std::string, std::size_t> counts;
    for (const auto& t : truth) ++counts[t];
    positive = counts.begin()->first;
    for (const auto& [name, n] : counts) {
      if (n < counts[positive]) positive = name;
    }
  }
  std::vector<int> yt, yp;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    yt.push_back(truth[i] == positive ? 1 : 0);
    yp.push_back(pred[i] == positive ? 1 : 0);
  }
  const auto cm = confusion(yt, yp, 1);
  const auto s = score(cm);
  nlohmann::json j = metrics_json(s, have_s ? roc_auc(score_col, yt, 1) : 0.0);
  if (!have_s) j.erase("roc_auc");
  j["positive"] = positive;
  j["confusion"] = {{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}};
  if (opt.format == OutputFormat::Json) {
    out << dump(j);
  } else {
    out << "metric,value\n";
    for (const auto& [k, v] : j.items()) {
      if (v.is_number()) out << k << "," << fmt6(v.get<double>()) << "\n";
    }
  }
  return kOk;
}

/// Dataset summary: shape, class counts, imbalance ratio, content hash and
/// the automatic DBSCAN parameters on the standardized features.
inline int cmd_inspect(const std::filesystem::path& input, const Options& opt, std::ostream& out = std::cout) {
  const auto loaded = load_dataset(input, source_format(input, opt));
  const auto& d = loaded.dataset;
  nlohmann::json j;
  j["dataset"] = input.stem().string();
  j["hash"] = loaded.hash;
  j["rows"] = d.size();
  j["features"] = d.feature_names;
  const auto counts = d.class_counts();
  for (std::size_t c = 0; c < d.num_classes(); ++c) j["class_counts"][d.class_names[c]] = counts[c];
  if (d.num_classes() == 2 && counts[0] != counts[1]) {
    const auto bc = binary_classes(d);
    j["minority"] = d.class_names[static_cast<std::size_t>(bc.minority)];
    j["imbalance_ratio"] = round6(static_cast<double>(bc.n_majority) / static_cast<double>(bc.n_minority));
    if (d.size() <= 20000) {
      const auto p = auto_dbscan_params(standardize(d).dataset.features, opt.config.pipeline.epsilon,
                                        opt.config.pipeline.min_pts, opt.config.pipeline.eps_quantile);
      j["dbscan_auto"] = {{"epsilon", round6(p.epsilon)}, {"min_pts", p.min_pts}};
    }
  }
  out << dump(j);
  return kOk;
}

}  // namespace ihho::cli
