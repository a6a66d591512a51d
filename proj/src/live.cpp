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

#include "explain/live.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "explain/error.hpp"
#include "explain/linalg.hpp"
#include "explain/random.hpp"

namespace explain {

namespace {

double r_squared(const LinearModel& model, const Eigen::MatrixXd& rows, const Eigen::VectorXd& y) {
  const Eigen::VectorXd fitted = model.score(rows);
  const double rss = (y - fitted).squaredNorm();
  const double tss = (y.array() - sequential_mean(y)).matrix().squaredNorm();
  if (tss == 0.0) return rss == 0.0 ? 1.0 : 0.0;
  return std::clamp(1.0 - rss / tss, 0.0, 1.0);
}

struct ScaledLasso {
  double intercept;
  Eigen::VectorXd coefficients;  // original scale
};

// Maps a lasso fit on standardized columns back to the original scale.
ScaledLasso unstandardize(const LassoResult<double>& fit, const Standardization<double>& s) {
  ScaledLasso out{fit.intercept, Eigen::VectorXd::Zero(fit.coefficients.size())};
  for (Eigen::Index j = 0; j < fit.coefficients.size(); ++j) {
    if (s.scales(j) > 0) out.coefficients(j) = fit.coefficients(j) / s.scales(j);
    out.intercept -= out.coefficients(j) * s.means(j);
  }
  return out;
}

std::vector<double> lambda_grid(double lambda_max, const LassoOptions& options) {
  std::vector<double> grid(options.grid_size);
  if (options.grid_size == 1) return {lambda_max};
  const double log_hi = std::log(lambda_max);
  const double log_lo = std::log(lambda_max * options.min_ratio);
  for (std::size_t k = 0; k < options.grid_size; ++k)
    grid[k] = std::exp(log_hi + (log_lo - log_hi) * static_cast<double>(k) /
                                    static_cast<double>(options.grid_size - 1));
  return grid;
}

double cross_validate_lambda(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::uint64_t seed,
                             const LassoOptions& options) {
  Eigen::MatrixXd z;
  standardize_columns(x, z);
  const double lambda_max = lasso_lambda_max(z, y);
  if (!(lambda_max > 0)) return 0.0;
  const auto grid = lambda_grid(lambda_max, options);
  const std::size_t n = static_cast<std::size_t>(x.rows());
  const std::size_t folds = std::min(options.folds, n);
  if (folds < 2) throw ModelError("cross-validation needs at least 2 rows");

  Rng rng = make_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const auto perm = random_permutation(n, rng);
  std::vector<std::size_t> fold_of(n);
  for (std::size_t i = 0; i < n; ++i) fold_of[perm[i]] = i % folds;

  std::vector<double> error(grid.size(), 0.0);
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> train, test;
    for (std::size_t i = 0; i < n; ++i) (fold_of[i] == f ? test : train).push_back(static_cast<Eigen::Index>(i));
    const Eigen::MatrixXd xt = x(train, Eigen::all);
    const Eigen::VectorXd yt = y(train);
    const Eigen::MatrixXd xv = x(test, Eigen::all);
    const Eigen::VectorXd yv = y(test);
    Eigen::MatrixXd zt;
    const auto stats = standardize_columns(xt, zt);
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(x.cols());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto fit = lasso_coordinate_descent(zt, yt, grid[k], options.control, &warm);
      warm = fit.coefficients;
      const auto scaled = unstandardize(fit, stats);
      const Eigen::VectorXd pred = (xv * scaled.coefficients).array() + scaled.intercept;
      error[k] += (yv - pred).squaredNorm();
    }
  }
  const auto best = std::min_element(error.begin(), error.end());
  return grid[static_cast<std::size_t>(best - error.begin())];
}

}  // namespace

LocalDataset sample_locally(const Dataset& dataset, const Observation& x_new, std::string_view response,
                            std::size_t size, std::uint64_t seed) {
  const auto response_index = dataset.find_column(response);
  if (!response_index) throw DataError(fmt::format("response column '{}' not found", response));
  const Dataset d = dataset.with_response(*response_index);
  const std::size_t p = d.n_features();
  if (p == 0) throw DataError("dataset has no feature columns");
  if (x_new.size() != p)
    throw DataError(fmt::format("observation has {} values, dataset has {} features", x_new.size(), p));

  LocalDataset local;
  local.schema = d.feature_schema();
  local.origin = x_new;
  local.response_name = std::string(response);
  local.seed = seed;
  local.rows = x_new.values.transpose().replicate(static_cast<Eigen::Index>(size), 1);
  if (size == 0) return local;

  Rng rng = make_rng(seed);
  const auto& cols = d.feature_columns();
  auto redraw = [&](std::size_t row, std::size_t feature) {
    local.rows(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(feature)) =
        empirical_draw(d, cols[feature], rng);
  };
  if (p <= size) {
    for (std::size_t i = 0; i < p; ++i) redraw(i, i);
    for (std::size_t i = p; i < size; ++i) redraw(i, uniform_index(rng, p));
  } else {
    auto subset = random_permutation(p, rng);
    subset.resize(size);
    for (std::size_t i = 0; i < size; ++i) redraw(i, subset[uniform_index(rng, size)]);
  }
  return local;
}

LocalDataset add_predictions(LocalDataset local, const Predictor& predictor) {
  if (local.response) throw UsageError("local dataset already has predictions");
  if (predictor.schema().names != local.schema.names || predictor.schema().kinds != local.schema.kinds)
    throw DataError("predictor feature schema does not match the local dataset");
  local.response = predictor.score(local.rows);
  return local;
}

void write_local_csv(const LocalDataset& local, std::ostream& out, char delimiter) {
  std::vector<Column> cols;
  for (std::size_t j = 0; j < local.schema.size(); ++j) {
    Column c{local.schema.names[j], local.schema.kinds[j], {}, local.schema.levels[j]};
    const auto col = local.rows.col(static_cast<Eigen::Index>(j));
    c.values.assign(col.data(), col.data() + col.size());
    cols.push_back(std::move(c));
  }
  if (local.response) {
    Column c{local.response_name, ColumnKind::kNumeric, {}, {}};
    c.values.assign(local.response->data(), local.response->data() + local.response->size());
    cols.push_back(std::move(c));
  }
  if (local.size() == 0) {
    for (std::size_t j = 0; j < cols.size(); ++j) out << (j ? std::string(1, delimiter) : "") << cols[j].name;
    out << '\n';
    return;
  }
  write_csv(Dataset(std::move(cols)), out, delimiter);
}

LocalDataset read_local_csv(std::string_view text, const FeatureSchema& schema, const Observation& origin,
                            std::string_view response_name, std::uint64_t seed) {
  LocalDataset local;
  local.schema = schema;
  local.origin = origin;
  local.response_name = std::string(response_name);
  local.seed = seed;

  const auto eol = text.find('\n');
  const std::string_view header_line = text.substr(0, eol);
  const char delim = header_line.find(';') != std::string_view::npos ? ';'
                     : header_line.find('\t') != std::string_view::npos ? '\t'
                                                                        : ',';
  const auto header = split_csv_record(header_line, delim);
  const bool with_response = header.size() == schema.size() + 1;
  if (header.size() != schema.size() && !with_response)
    throw DataError("local dataset CSV does not match the feature schema");
  for (std::size_t j = 0; j < schema.size(); ++j)
    if (header[j] != schema.names[j])
      throw DataError(fmt::format("local dataset column {} is '{}', expected '{}'", j + 1, header[j], schema.names[j]));
  if (with_response && header.back() != response_name)
    throw DataError(fmt::format("local dataset response column is '{}', expected '{}'", header.back(), response_name));

  std::vector<std::vector<std::string>> records;
  std::string_view rest = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
  while (!rest.empty()) {
    const auto e = rest.find('\n');
    const std::string_view line = rest.substr(0, e);
    if (!line.empty() && line != "\r") records.push_back(split_csv_record(line, delim));
    if (e == std::string_view::npos) break;
    rest.remove_prefix(e + 1);
  }
  local.rows.resize(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(schema.size()));
  if (with_response) local.response = Eigen::VectorXd(static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].size() != header.size()) throw DataError(fmt::format("ragged row {} in local dataset", i + 1));
    for (std::size_t j = 0; j < schema.size(); ++j)
      local.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = schema.parse_cell(j, records[i][j]);
    if (with_response) {
      FeatureSchema numeric{{local.response_name}, {ColumnKind::kNumeric}, {{}}};
      (*local.response)(static_cast<Eigen::Index>(i)) = numeric.parse_cell(0, records[i].back());
    }
  }
  return local;
}

SurrogateFit fit_explanation(const LocalDataset& local, WhiteBox white_box, std::optional<double> lambda,
                             const LassoOptions& options) {
  if (!local.response) throw UsageError("local dataset has no predictions; run add_predictions first");
  if (lambda && !(*lambda >= 0)) throw UsageError("lambda must be nonnegative");
  const Eigen::VectorXd& y = *local.response;
  const FeatureEncoder encoder = FeatureEncoder::fit(local.schema, local.rows, &local.origin);

  SurrogateFit fit;
  fit.white_box = white_box;
  if (white_box == WhiteBox::kOls) {
    try {
      fit.model = fit_ols(encoder, local.rows, y);
    } catch (const RankDeficiencyError& e) {
      throw ModelError(fmt::format(
          "local dataset is degenerate ({}); increase the neighbourhood size so every feature is "
          "perturbed",
          e.what()));
    } catch (const ModelError& e) {
      throw ModelError(fmt::format("{}; increase the neighbourhood size", e.what()));
    }
  } else {
    const Eigen::MatrixXd x = encoder.encode(local.rows);
    if (x.rows() < 2) throw ModelError("lasso surrogate needs at least 2 rows; increase the neighbourhood size");
    const double chosen = lambda ? *lambda : cross_validate_lambda(x, y, local.seed, options);
    Eigen::MatrixXd z;
    const auto stats = standardize_columns(x, z);
    const auto result = lasso_coordinate_descent(z, y, chosen, options.control);
    const auto scaled = unstandardize(result, stats);
    fit.model.encoder = encoder;
    fit.model.intercept = scaled.intercept;
    fit.model.coefficients = scaled.coefficients;
    fit.model.means = stats.means;
    fit.model.n_train = local.size();
    fit.lambda = chosen;
    fit.objective_trace = result.objective_trace;
  }
  for (Eigen::Index k = 0; k < fit.model.coefficients.size(); ++k)
    if (fit.model.coefficients(k) != 0.0)
      fit.selected_features.push_back(encoder.encoded_names()[static_cast<std::size_t>(k)]);
  fit.r2 = r_squared(fit.model, local.rows, y);
  return fit;
}

}  // namespace explain
