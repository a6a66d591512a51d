/*
 * Copyright 2026 The explain Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "explain/tabular.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>

#include "explain/error.hpp"

namespace explain {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_finite(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

struct Field {
  std::string text;
  bool quoted = false;
};

// RFC-4180 records; quoted fields may span lines.
std::vector<std::vector<Field>> split_records(std::string_view text, char delim) {
  std::vector<std::vector<Field>> records;
  std::vector<Field> record;
  Field field;
  bool in_quotes = false;
  bool record_has_content = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.text.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.text.push_back(c);
      }
      continue;
    }
    if (c == '"' && trim(field.text).empty()) {
      field.text.clear();
      field.quoted = true;
      in_quotes = true;
      record_has_content = true;
    } else if (c == delim) {
      record.push_back(std::move(field));
      field = Field{};
      record_has_content = true;
    } else if (c == '\n') {
      if (record_has_content || !field.text.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
      }
      record.clear();
      field = Field{};
      record_has_content = false;
    } else if (c == '\r' || (field.quoted && c == ' ')) {
      continue;
    } else {
      if (field.quoted) throw DataError("unexpected character after closing quote");
      field.text.push_back(c);
      record_has_content = true;
    }
  }
  if (in_quotes) throw DataError("unterminated quoted field");
  if (record_has_content || !trim(field.text).empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

char detect_delimiter(std::string_view text) {
  const auto eol = text.find('\n');
  const std::string_view first = text.substr(0, eol);
  std::array<std::pair<char, int>, 3> counts{{{',', 0}, {';', 0}, {'\t', 0}}};
  bool in_quotes = false;
  for (char c : first) {
    if (c == '"') in_quotes = !in_quotes;
    if (in_quotes) continue;
    for (auto& [d, n] : counts) n += (c == d);
  }
  auto best = std::max_element(counts.begin(), counts.end(),
                               [](const auto& a, const auto& b) { return a.second < b.second; });
  return best->second > 0 ? best->first : ',';
}

bool needs_quotes(std::string_view s, char delim) {
  if (s.empty()) return true;
  if (s.front() == ' ' || s.back() == ' ') return true;
  return s.find_first_of(std::string{delim, '"', '\n', '\r'}) != std::string_view::npos;
}

std::string quote_field(std::string_view s, char delim) {
  if (!needs_quotes(s, delim)) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

bool FeatureSchema::has_categorical() const {
  return std::find(kinds.begin(), kinds.end(), ColumnKind::kCategorical) != kinds.end();
}

std::optional<std::size_t> FeatureSchema::find(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  return std::nullopt;
}

std::string FeatureSchema::format_cell(std::size_t feature, double cell) const {
  if (kinds.at(feature) == ColumnKind::kCategorical) {
    const auto& lv = levels.at(feature);
    const auto code = static_cast<std::size_t>(cell);
    if (cell < 0 || code >= lv.size() || static_cast<double>(code) != cell)
      throw DataError(fmt::format("invalid level code {} for '{}'", cell, names[feature]));
    return lv[code];
  }
  return format_number(cell);
}

double FeatureSchema::parse_cell(std::size_t feature, std::string_view text) const {
  if (kinds.at(feature) == ColumnKind::kCategorical) {
    const auto& lv = levels.at(feature);
    auto it = std::lower_bound(lv.begin(), lv.end(), text);
    if (it == lv.end() || *it != text)
      throw DataError(fmt::format("unknown level '{}' for '{}'", text, names[feature]));
    return static_cast<double>(it - lv.begin());
  }
  auto value = parse_finite(text);
  if (!value)
    throw DataError(fmt::format("cannot parse '{}' as a number for '{}'", text, names[feature]));
  return *value;
}

Dataset::Dataset(std::vector<Column> columns, std::optional<std::size_t> response_index)
    : columns_(std::move(columns)), response_(response_index) {
  if (columns_.empty()) throw DataError("dataset has no columns");
  n_rows_ = columns_.front().values.size();
  if (n_rows_ == 0) throw DataError("dataset has no rows");
  std::unordered_set<std::string> seen;
  for (const auto& col : columns_) {
    if (col.name.empty()) throw DataError("empty column name");
    if (!seen.insert(col.name).second)
      throw DataError(fmt::format("duplicate column name '{}'", col.name));
    if (col.values.size() != n_rows_)
      throw DataError(fmt::format("column '{}' has {} cells, expected {}", col.name,
                                  col.values.size(), n_rows_));
    for (double v : col.values) {
      if (!std::isfinite(v))
        throw DataError(fmt::format("non-finite cell in column '{}'", col.name));
      if (col.is_categorical() &&
          (v < 0 || v >= static_cast<double>(col.levels.size()) || std::floor(v) != v))
        throw DataError(fmt::format("invalid level code in column '{}'", col.name));
    }
  }
  if (response_ && *response_ >= columns_.size())
    throw DataError(fmt::format("response index {} out of range", *response_));
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (!response_ || i != *response_) features_.push_back(i);
}

std::optional<std::size_t> Dataset::find_column(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i].name == name) return i;
  return std::nullopt;
}

Dataset Dataset::with_response(std::optional<std::size_t> response_index) const {
  return Dataset(columns_, response_index);
}

FeatureSchema Dataset::feature_schema() const {
  FeatureSchema schema;
  for (std::size_t c : features_) {
    schema.names.push_back(columns_[c].name);
    schema.kinds.push_back(columns_[c].kind);
    schema.levels.push_back(columns_[c].levels);
  }
  return schema;
}

Eigen::MatrixXd Dataset::feature_matrix() const {
  Eigen::MatrixXd x(n_rows_, features_.size());
  for (std::size_t j = 0; j < features_.size(); ++j)
    x.col(j) = Eigen::Map<const Eigen::VectorXd>(columns_[features_[j]].values.data(), n_rows_);
  return x;
}

Eigen::VectorXd Dataset::response() const {
  if (!response_) throw DataError("dataset has no response column");
  const Column& col = columns_[*response_];
  if (col.is_categorical())
    throw DataError(fmt::format("response column '{}' is not numeric", col.name));
  return Eigen::Map<const Eigen::VectorXd>(col.values.data(), n_rows_);
}

Observation Dataset::observation(std::size_t row) const {
  if (row >= n_rows_)
    throw DataError(fmt::format("row {} out of range (dataset has {} rows)", row, n_rows_));
  Observation obs{Eigen::VectorXd(features_.size())};
  for (std::size_t j = 0; j < features_.size(); ++j) obs.values[j] = columns_[features_[j]].values[row];
  return obs;
}

Dataset parse_csv(std::string_view text, const CsvOptions& options) {
  const char delim = options.delimiter.value_or(detect_delimiter(text));
  if (delim != ',' && delim != ';' && delim != '\t')
    throw DataError(fmt::format("unsupported delimiter '{}'", delim));
  auto records = split_records(text, delim);
  if (records.empty()) throw DataError("empty CSV input");

  std::vector<std::string> names;
  std::size_t first_data = 0;
  const std::size_t arity = records.front().size();
  if (options.has_header) {
    for (auto& f : records.front()) names.push_back(f.quoted ? f.text : std::string(trim(f.text)));
    first_data = 1;
  } else {
    for (std::size_t j = 0; j < arity; ++j) names.push_back(fmt::format("c{}", j + 1));
  }
  {
    std::set<std::string> seen;
    for (const auto& n : names) {
      if (n.empty()) throw DataError("empty header name");
      if (!seen.insert(n).second) throw DataError(fmt::format("duplicate header name '{}'", n));
    }
  }
  if (records.size() <= first_data) throw DataError("CSV input has a header but no rows");
  for (std::size_t r = first_data; r < records.size(); ++r) {
    if (records[r].size() != arity)
      throw DataError(fmt::format("ragged rows: record {} has {} fields, expected {}", r + 1,
                                  records[r].size(), arity));
  }

  const std::size_t n = records.size() - first_data;
  std::vector<Column> columns(arity);
  for (std::size_t j = 0; j < arity; ++j) {
    Column& col = columns[j];
    col.name = names[j];
    std::vector<std::optional<double>> parsed(n);
    bool all_numeric = true;
    for (std::size_t i = 0; i < n; ++i) {
      const Field& f = records[first_data + i][j];
      if (!f.quoted && trim(f.text).empty())
        throw DataError(fmt::format("missing cell in column '{}' at record {}", col.name,
                                    first_data + i + 1));
      parsed[i] = parse_finite(f.text);
      all_numeric = all_numeric && parsed[i].has_value();
    }
    auto override_it = options.type_overrides.find(col.name);
    if (override_it != options.type_overrides.end()) {
      if (override_it->second == ColumnKind::kNumeric && !all_numeric)
        throw DataError(fmt::format("column '{}' is declared numeric but has unparsable cells",
                                    col.name));
      col.kind = override_it->second;
    } else {
      col.kind = all_numeric ? ColumnKind::kNumeric : ColumnKind::kCategorical;
    }
    col.values.resize(n);
    if (col.kind == ColumnKind::kNumeric) {
      for (std::size_t i = 0; i < n; ++i) col.values[i] = *parsed[i];
    } else {
      std::vector<std::string> labels(n);
      for (std::size_t i = 0; i < n; ++i) {
        const Field& f = records[first_data + i][j];
        labels[i] = f.quoted ? f.text : std::string(trim(f.text));
      }
      col.levels = labels;
      std::sort(col.levels.begin(), col.levels.end());
      col.levels.erase(std::unique(col.levels.begin(), col.levels.end()), col.levels.end());
      for (std::size_t i = 0; i < n; ++i) {
        auto it = std::lower_bound(col.levels.begin(), col.levels.end(), labels[i]);
        col.values[i] = static_cast<double>(it - col.levels.begin());
      }
    }
  }
  for (const auto& [name, kind] : options.type_overrides) {
    if (std::find(names.begin(), names.end(), name) == names.end())
      throw DataError(fmt::format("type override for unknown column '{}'", name));
  }

  std::optional<std::size_t> response;
  if (options.response_name) {
    auto it = std::find(names.begin(), names.end(), *options.response_name);
    if (it == names.end())
      throw DataError(fmt::format("response column '{}' not found", *options.response_name));
    response = static_cast<std::size_t>(it - names.begin());
  }
  return Dataset(std::move(columns), response);
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw DataError(fmt::format("failed reading '{}'", path.string()));
  return parse_csv(buffer.str(), options);
}

std::vector<std::string> split_csv_record(std::string_view line, char delimiter) {
  auto records = split_records(line, delimiter);
  std::vector<std::string> out;
  if (records.empty()) return out;
  if (records.size() > 1) throw DataError("expected a single CSV record");
  for (auto& f : records.front()) out.push_back(f.quoted ? f.text : std::string(trim(f.text)));
  return out;
}

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

void write_csv(const Dataset& dataset, std::ostream& out, char delimiter) {
  const auto& cols = dataset.columns();
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (j) out << delimiter;
    out << quote_field(cols[j].name, delimiter);
  }
  out << '\n';
  for (std::size_t i = 0; i < dataset.n_rows(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (j) out << delimiter;
      const Column& c = cols[j];
      if (c.is_categorical())
        out << quote_field(c.levels[static_cast<std::size_t>(c.values[i])], delimiter);
      else
        out << format_number(c.values[i]);
    }
    out << '\n';
  }
}

double column_mean(const Dataset& dataset, std::size_t col) {
  const Column& c = dataset.column(col);
  if (c.is_categorical())
    throw DataError(fmt::format("column '{}' is categorical; mean undefined", c.name));
  double sum = 0.0;
  for (double v : c.values) sum += v;
  double mean = sum / static_cast<double>(c.values.size());
  // Rounding can push the mean of a near-constant column past its range.
  const auto [lo, hi] = std::minmax_element(c.values.begin(), c.values.end());
  return std::clamp(mean, *lo, *hi);
}

double empirical_draw(const Dataset& dataset, std::size_t col, Rng& rng) {
  const Column& c = dataset.column(col);
  return c.values[uniform_index(rng, c.values.size())];
}

}  // namespace explain
