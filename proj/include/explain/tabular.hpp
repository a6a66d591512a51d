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

// Columnar tabular data: CSV ingestion, per-column empirical distributions.
//
// Cells are stored as doubles. Categorical cells hold the index of their label
// in the column's sorted level set, so a row of any mix of kinds is a plain
// Eigen vector and hybrid rows are built by column overwrites.

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "explain/random.hpp"

namespace explain {

enum class ColumnKind { kNumeric, kCategorical };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  // Numeric value, or level code for categorical columns.
  std::vector<double> values;
  // Sorted, unique. Empty for numeric columns.
  std::vector<std::string> levels;

  bool is_categorical() const { return kind == ColumnKind::kCategorical; }
};

// Names, kinds and level sets of the feature columns a predictor consumes.
struct FeatureSchema {
  std::vector<std::string> names;
  std::vector<ColumnKind> kinds;
  std::vector<std::vector<std::string>> levels;

  std::size_t size() const { return names.size(); }
  bool has_categorical() const;
  std::optional<std::size_t> find(std::string_view name) const;

  // Display form of a cell: shortest round-trip decimal, or the level label.
  std::string format_cell(std::size_t feature, double cell) const;
  // Inverse of format_cell. Throws DataError for unparsable numbers or
  // unknown labels.
  double parse_cell(std::size_t feature, std::string_view text) const;

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

// One explained instance, aligned to a FeatureSchema.
struct Observation {
  Eigen::VectorXd values;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
};

// Immutable table. All columns share n_rows >= 1; names are unique and
// non-empty; numeric cells are finite.
class Dataset {
 public:
  Dataset(std::vector<Column> columns,
          std::optional<std::size_t> response_index = std::nullopt);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_columns() const { return columns_.size(); }
  const Column& column(std::size_t i) const { return columns_.at(i); }
  const std::vector<Column>& columns() const { return columns_; }
  std::optional<std::size_t> response_index() const { return response_; }
  std::optional<std::size_t> find_column(std::string_view name) const;

  // Same cells, different response designation.
  Dataset with_response(std::optional<std::size_t> response_index) const;

  // Column indices of the features, i.e. every column but the response.
  const std::vector<std::size_t>& feature_columns() const { return features_; }
  std::size_t n_features() const { return features_.size(); }
  FeatureSchema feature_schema() const;
  // n_rows x n_features, cells in feature order.
  Eigen::MatrixXd feature_matrix() const;
  // Throws DataError when no response column is set or it is categorical.
  Eigen::VectorXd response() const;

  // Feature cells of a 0-based row.
  Observation observation(std::size_t row) const;

 private:
  std::vector<Column> columns_;
  std::optional<std::size_t> response_;
  std::vector<std::size_t> features_;
  std::size_t n_rows_ = 0;
};

struct CsvOptions {
  // One of ',', ';', '\t'. Detected from the first line when unset.
  std::optional<char> delimiter;
  bool has_header = true;
  std::optional<std::string> response_name;
  std::map<std::string, ColumnKind> type_overrides;
};

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset parse_csv(std::string_view text, const CsvOptions& options = {});

// Writes a header and every row. Numbers use shortest round-trip decimal
// form; fields are quoted only when they need to be.
void write_csv(const Dataset& dataset, std::ostream& out, char delimiter = ',');

// Splits one CSV record (no trailing newline) into fields, honouring quotes.
std::vector<std::string> split_csv_record(std::string_view line, char delimiter);

// Shortest decimal string that parses back to the same double.
std::string format_number(double value);

double column_mean(const Dataset& dataset, std::size_t col);

// Cell of a uniformly drawn row, i.e. a draw with replacement from the
// column's observed values.
double empirical_draw(const Dataset& dataset, std::size_t col, Rng& rng);

}  // namespace explain
