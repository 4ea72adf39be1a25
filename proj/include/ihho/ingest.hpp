#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ihho/core.hpp"

namespace ihho {

/// Which column holds the class label: unset (last column), a 0-based index,
/// or a header name.
using LabelColumn = std::variant<std::monostate, std::size_t, std::string>;

enum class FormatKind { Csv, Keel };

struct SourceFormat {
  FormatKind kind = FormatKind::Csv;
  LabelColumn label_column;
  /// KEEL only: encode nominal input attributes by declaration order instead
  /// of rejecting them.
  bool ordinal_nominal_inputs = false;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

/// Splits text into lines, accepting LF and CRLF. Returns (1-based line, text).
inline std::vector<std::pair<std::size_t, std::string_view>> lines_of(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t line = 1;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view l = text.substr(0, nl);
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    out.emplace_back(line++, l);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return out;
}

/// Comma split with optional double-quoted fields ("" escapes a quote).
/// Whitespace around fields is dropped.
inline std::vector<std::string> split_fields(std::string_view line, std::size_t line_no) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (true) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::string field;
    if (i < line.size() && line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < line.size()) {
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field += '"';
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        field += line[i++];
      }
      if (!closed) throw ParseError(line_no, "", "unterminated quoted field");
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      if (i < line.size() && line[i] != ',') throw ParseError(line_no, "", "text after closing quote");
    } else {
      const auto comma = line.find(',', i);
      field = std::string(trim(line.substr(i, comma == std::string_view::npos ? std::string_view::npos : comma - i)));
      i = comma == std::string_view::npos ? line.size() : comma;
    }
    out.push_back(std::move(field));
    if (i >= line.size()) break;
    ++i;  // skip comma
  }
  return out;
}

inline double parse_number(std::string_view cell, std::size_t line, const std::string& column) {
  if (cell.empty()) throw ParseError(line, column, "empty cell");
  if (cell == "?" || cell == "<null>") throw ParseError(line, column, "missing value '" + std::string(cell) + "'");
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ParseError(line, column, "not a number: '" + std::string(cell) + "'");
  }
  if (!std::isfinite(v)) throw ParseError(line, column, "non-finite value");
  return v;
}

/// Assigns contiguous ids to label strings in first-appearance order.
struct LabelMap {
  std::vector<std::string> names;

  int id_of(const std::string& name) {
    const auto it = std::ranges::find(names, name);
    if (it != names.end()) return static_cast<int>(it - names.begin());
    names.push_back(name);
    return static_cast<int>(names.size() - 1);
  }
};

}  // namespace detail

/// Parses comma-separated text with a mandatory header row. Feature cells
/// must be numeric; the label column may hold any text.
inline Dataset parse_csv(std::string_view text, const LabelColumn& label_column = {}) {
  if (!text.empty() && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  auto lines = detail::lines_of(text);
  std::erase_if(lines, [](const auto& l) { return detail::trim(l.second).empty(); });
  if (lines.empty()) throw ParseError(1, "", "empty file");

  const auto header = detail::split_fields(lines[0].second, lines[0].first);
  const std::size_t width = header.size();
  if (width < 2) throw ParseError(lines[0].first, "", "need at least one feature and one label column");

  std::size_t label_idx = width - 1;
  if (const auto* idx = std::get_if<std::size_t>(&label_column)) {
    if (*idx >= width) throw Error(ErrorKind::Label, "label column index " + std::to_string(*idx) + " out of range");
    label_idx = *idx;
  } else if (const auto* name = std::get_if<std::string>(&label_column)) {
    const auto it = std::ranges::find(header, *name);
    if (it == header.end()) throw Error(ErrorKind::Label, "label column '" + *name + "' not in header");
    label_idx = static_cast<std::size_t>(it - header.begin());
  }

  Dataset d;
  d.label_name = header[label_idx];
  for (std::size_t j = 0; j < width; ++j) {
    if (j != label_idx) d.feature_names.push_back(header[j]);
  }
  std::vector<double> values;
  detail::LabelMap labels;
  std::vector<double> row(width - 1);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto [line_no, line] = lines[li];
    const auto fields = detail::split_fields(line, line_no);
    if (fields.size() != width) {
      throw ParseError(line_no, "", "expected " + std::to_string(width) + " fields, found " +
                                        std::to_string(fields.size()));
    }
    std::size_t f = 0;
    for (std::size_t j = 0; j < width; ++j) {
      if (j == label_idx) continue;
      row[f++] = detail::parse_number(fields[j], line_no, header[j]);
    }
    if (fields[label_idx].empty()) throw ParseError(line_no, header[label_idx], "empty label");
    d.labels.push_back(labels.id_of(fields[label_idx]));
    values.insert(values.end(), row.begin(), row.end());
  }
  if (d.labels.empty()) throw ParseError(lines.back().first, "", "no data rows");
  d.features = Matrix(d.labels.size(), width - 1, std::move(values));
  d.class_names = std::move(labels.names);
  d.row_ids.resize(d.labels.size());
  std::iota(d.row_ids.begin(), d.row_ids.end(), std::size_t{0});
  return d;
}

/// Parses the KEEL `.dat` layout: `@relation`, `@attribute` lines, optional
/// `@inputs` / `@outputs`, then `@data`. Directives are case-insensitive and
/// `%` starts a comment line.
inline Dataset parse_keel(std::string_view text, bool ordinal_nominal_inputs = false) {
  struct Attribute {
    std::string name;
    bool nominal = false;
    std::vector<std::string> values;
  };
  std::vector<Attribute> attrs;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string relation;

  const auto lines = detail::lines_of(text);
  std::size_t li = 0;
  bool in_data = false;
  for (; li < lines.size(); ++li) {
    const auto [line_no, raw] = lines[li];
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '%') continue;
    if (line.front() != '@') throw ParseError(line_no, "", "expected a directive before @data");
    const auto sp = line.find_first_of(" \t");
    const std::string directive = detail::lower(line.substr(0, sp));
    const std::string_view rest = sp == std::string_view::npos ? std::string_view{} : detail::trim(line.substr(sp));
    auto name_list = [&](std::string_view s) {
      std::vector<std::string> names;
      for (auto& n : detail::split_fields(s, line_no)) names.push_back(n);
      return names;
    };
    if (directive == "@relation") {
      relation = std::string(rest);
    } else if (directive == "@attribute") {
      Attribute a;
      std::string_view r = rest;
      std::size_t name_end = 0;
      if (!r.empty() && r.front() == '\'') {
        name_end = r.find('\'', 1);
        if (name_end == std::string_view::npos) throw ParseError(line_no, "", "unterminated attribute name");
        a.name = std::string(r.substr(1, name_end - 1));
        ++name_end;
      } else {
        name_end = r.find_first_of(" \t{");
        a.name = std::string(r.substr(0, name_end));
      }
      if (a.name.empty() || name_end == std::string_view::npos) throw ParseError(line_no, "", "malformed @attribute");
      const auto type = detail::trim(r.substr(name_end));
      if (!type.empty() && type.front() == '{') {
        const auto close = type.find('}');
        if (close == std::string_view::npos) throw ParseError(line_no, a.name, "unterminated nominal value list");
        a.nominal = true;
        a.values = name_list(type.substr(1, close - 1));
      } else {
        const auto kind = detail::lower(type.substr(0, type.find_first_of(" \t[")));
        if (kind != "real" && kind != "integer" && kind != "numeric") {
          throw ParseError(line_no, a.name, "unsupported attribute type '" + std::string(type) + "'");
        }
      }
      attrs.push_back(std::move(a));
    } else if (directive == "@inputs" || directive == "@input") {
      inputs = name_list(rest);
    } else if (directive == "@outputs" || directive == "@output") {
      outputs = name_list(rest);
    } else if (directive == "@data") {
      in_data = true;
      ++li;
      break;
    } else {
      throw ParseError(line_no, "", "unknown directive '" + std::string(line.substr(0, sp)) + "'");
    }
  }
  if (!in_data) throw ParseError(lines.empty() ? 1 : lines.back().first, "", "missing @data section");
  if (attrs.size() < 2) throw ParseError(1, "", "need at least two @attribute declarations");

  auto index_of = [&](const std::string& name) -> std::size_t {
    for (std::size_t j = 0; j < attrs.size(); ++j) {
      if (attrs[j].name == name) return j;
    }
    throw ParseError(1, name, "@inputs/@outputs names an undeclared attribute");
  };
  if (outputs.size() > 1) throw ParseError(1, "", "only a single output attribute is supported");
  const std::size_t out_idx = outputs.empty() ? attrs.size() - 1 : index_of(outputs[0]);
  std::vector<std::size_t> in_idx;
  if (inputs.empty()) {
    for (std::size_t j = 0; j < attrs.size(); ++j) {
      if (j != out_idx) in_idx.push_back(j);
    }
  } else {
    for (const auto& n : inputs) in_idx.push_back(index_of(n));
  }
  for (std::size_t j : in_idx) {
    if (attrs[j].nominal && !ordinal_nominal_inputs) {
      throw ParseError(1, attrs[j].name, "nominal input attributes are not supported");
    }
  }

  Dataset d;
  d.label_name = attrs[out_idx].name;
  for (std::size_t j : in_idx) d.feature_names.push_back(attrs[j].name);
  detail::LabelMap labels;
  std::vector<double> values;
  for (; li < lines.size(); ++li) {
    const auto [line_no, raw] = lines[li];
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '%') continue;
    const auto fields = detail::split_fields(line, line_no);
    if (fields.size() != attrs.size()) {
      throw ParseError(line_no, "", "expected " + std::to_string(attrs.size()) + " values, found " +
                                        std::to_string(fields.size()));
    }
    for (std::size_t j : in_idx) {
      if (attrs[j].nominal) {
        const auto it = std::ranges::find(attrs[j].values, fields[j]);
        if (it == attrs[j].values.end()) throw ParseError(line_no, attrs[j].name, "undeclared nominal value");
        values.push_back(static_cast<double>(it - attrs[j].values.begin()));
      } else {
        values.push_back(detail::parse_number(fields[j], line_no, attrs[j].name));
      }
    }
    if (fields[out_idx].empty()) throw ParseError(line_no, attrs[out_idx].name, "empty label");
    d.labels.push_back(labels.id_of(fields[out_idx]));
  }
  if (d.labels.empty()) throw ParseError(lines.empty() ? 1 : lines.back().first, "", "no data rows after @data");
  d.features = Matrix(d.labels.size(), in_idx.size(), std::move(values));
  d.class_names = std::move(labels.names);
  d.row_ids.resize(d.labels.size());
  std::iota(d.row_ids.begin(), d.row_ids.end(), std::size_t{0});
  return d;
}

/// Shortest decimal text that reads back to the same double.
inline std::string format_exact(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace detail {
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos && trim(s) == s) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + '"';
}
}  // namespace detail

/// Serializes with the label as the last column. `extra` appends one more
/// named column (e.g. provenance) with per-row text.
inline std::string write_csv(const Dataset& d, const std::string& extra_name = {},
                             const std::vector<std::string>& extra = {}) {
  std::string out;
  for (const auto& n : d.feature_names) out += detail::csv_field(n) + ',';
  out += detail::csv_field(d.label_name);
  if (!extra_name.empty()) out += ',' + detail::csv_field(extra_name);
  out += '\n';
  for (std::size_t r = 0; r < d.size(); ++r) {
    for (double v : d.features.row(r)) out += format_exact(v) + ',';
    out += detail::csv_field(d.class_names[static_cast<std::size_t>(d.labels[r])]);
    if (!extra_name.empty()) out += ',' + detail::csv_field(extra[r]);
    out += '\n';
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << content;
}

/// FNV-1a 64-bit digest of the file bytes, as 16 hex digits.
inline std::string content_hash(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(bytes)));
  return buf;
}

inline FormatKind infer_format(const std::filesystem::path& path) {
  const auto ext = detail::lower(path.extension().string());
  return ext == ".dat" || ext == ".keel" ? FormatKind::Keel : FormatKind::Csv;
}

struct LoadedDataset {
  Dataset dataset;
  std::string hash;
};

inline LoadedDataset load_dataset(const std::filesystem::path& path, const SourceFormat& format) {
  const auto bytes = read_file(path);
  LoadedDataset out;
  out.hash = content_hash(bytes);
  if (format.kind == FormatKind::Keel) {
    out.dataset = parse_keel(bytes, format.ordinal_nominal_inputs);
    if (!std::holds_alternative<std::monostate>(format.label_column)) {
      throw Error(ErrorKind::Label, "KEEL files take their label from @outputs");
    }
  } else {
    out.dataset = parse_csv(bytes, format.label_column);
  }
  return out;
}

}  // namespace ihho
