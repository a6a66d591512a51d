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

// Local surrogate explanations: simulate a neighbourhood of x_new by
// perturbing one feature per row, score it with the black box, and fit a
// linear white box to the scores. Every simulated row gets weight 1.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "explain/lasso.hpp"
#include "explain/predict.hpp"
#include "explain/tabular.hpp"

namespace explain {

struct LocalDataset {
  FeatureSchema schema;
  Eigen::MatrixXd rows;  // size x p
  std::optional<Eigen::VectorXd> response;
  Observation origin;
  std::string response_name;
  std::uint64_t seed = 0;

  std::size_t size() const { return static_cast<std::size_t>(rows.rows()); }
};

// size copies of x_new. With p <= size, row i (i < p) gets feature i
// redrawn from its empirical distribution and every later row one uniformly
// chosen feature. With p > size, a uniform subset of `size` features is
// drawn first and each row redraws one uniformly chosen member of it.
// Draws may reproduce the original value.
LocalDataset sample_locally(const Dataset& dataset, const Observation& x_new, std::string_view response,
                            std::size_t size, std::uint64_t seed);

// Fills the response with predictor scores. Throws UsageError if the
// response is already present.
LocalDataset add_predictions(LocalDataset local, const Predictor& predictor);

// CSV form: feature columns, then the response column when present.
void write_local_csv(const LocalDataset& local, std::ostream& out, char delimiter = ',');
LocalDataset read_local_csv(std::string_view text, const FeatureSchema& schema, const Observation& origin,
                            std::string_view response_name, std::uint64_t seed = 0);

enum class WhiteBox { kOls, kLasso };

struct SurrogateFit {
  LinearModel model;
  WhiteBox white_box = WhiteBox::kOls;
  double lambda = 0.0;  // 0 for OLS
  std::vector<std::string> selected_features;  // encoded names, nonzero coefficients
  double r2 = 0.0;
  // Lasso only: objective after each sweep of the final fit.
  std::vector<double> objective_trace;
};

struct LassoOptions {
  LassoControl control;
  std::size_t folds = 5;
  std::size_t grid_size = 50;
  double min_ratio = 1e-4;
};

// OLS: unweighted least squares. Lasso: coordinate descent on standardized
// features with an unpenalized intercept, coefficients mapped back to the
// original scale; lambda defaults to 5-fold cross-validation over a
// log-spaced grid from lambda_max down to min_ratio * lambda_max.
// Categorical features are encoded against x_new's level.
SurrogateFit fit_explanation(const LocalDataset& local, WhiteBox white_box,
                             std::optional<double> lambda = std::nullopt, const LassoOptions& options = {});

}  // namespace explain
