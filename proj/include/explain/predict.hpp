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

// Scoring functions f: rows -> reals. Rows are n x p matrices of feature
// cells in FeatureSchema order (categorical cells hold level codes).

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "explain/tabular.hpp"

namespace explain {

// Maps feature cells to design columns. Numeric features pass through;
// a categorical feature becomes one indicator per observed level other than
// its reference level.
class FeatureEncoder {
 public:
  FeatureEncoder() = default;

  // Numeric-only schema; every feature maps to itself.
  static FeatureEncoder identity(const FeatureSchema& schema);

  // Reference levels come from `reference` when given, else the first level.
  // Only levels present in `rows` get an indicator.
  static FeatureEncoder fit(const FeatureSchema& schema, const Eigen::MatrixXd& rows,
                            const Observation* reference = nullptr);

  Eigen::MatrixXd encode(const Eigen::MatrixXd& rows) const;
  Eigen::VectorXd encode(const Observation& obs) const;

  const FeatureSchema& schema() const { return schema_; }
  std::size_t n_encoded() const { return slots_.size(); }
  // "name" for numeric features, "name=level" for indicators.
  const std::vector<std::string>& encoded_names() const { return names_; }
  // Feature index each encoded column derives from.
  std::size_t source_feature(std::size_t encoded) const { return slots_.at(encoded).feature; }

 private:
  struct Slot {
    std::size_t feature = 0;
    std::optional<double> level;  // nullopt: numeric pass-through
  };
  FeatureSchema schema_;
  std::vector<Slot> slots_;
  std::vector<std::string> names_;
};

// f(x) = intercept + coefficients . enc(x). `means` are the encoded training
// column means that lm-break centres on.
struct LinearModel {
  FeatureEncoder encoder;
  double intercept = 0.0;
  Eigen::VectorXd coefficients;
  Eigen::VectorXd means;
  // Absent for penalized fits.
  std::optional<Eigen::VectorXd> std_errors;
  std::optional<double> intercept_std_error;
  double residual_variance = 0.0;
  std::size_t n_train = 0;

  // Numeric-only model from explicit parameters.
  static LinearModel from_parameters(const FeatureSchema& schema, double intercept,
                                     Eigen::VectorXd coefficients, Eigen::VectorXd means);

  Eigen::VectorXd score(const Eigen::MatrixXd& rows) const;
  double score(const Observation& obs) const;
};

// Least squares by Householder QR (never the normal equations). Throws
// RankDeficiencyError naming the offending column, or ModelError when there
// are too few rows (need n > encoded features + 1).
LinearModel fit_ols(const Dataset& dataset, std::size_t response);
// Same on a bare design; rows are in `encoder.schema()` order.
LinearModel fit_ols(const FeatureEncoder& encoder, const Eigen::MatrixXd& rows,
                    const Eigen::VectorXd& y);

struct KernelRidgeModel {
  Eigen::MatrixXd points;      // p x n, one standardized training point per column
  Eigen::VectorXd centre;      // training means
  Eigen::VectorXd scale;       // training standard deviations (1 for constants)
  Eigen::VectorXd dual;        // (K + ridge I)^{-1} (y - offset)
  double offset = 0.0;         // mean response
  double gamma = 0.0;
  double ridge = 0.0;

  Eigen::VectorXd score(const Eigen::MatrixXd& rows) const;
};

enum class PredictorKind { kConstant, kLinear, kKernelRidge, kExternal, kFunction };

const char* to_string(PredictorKind kind);

// Immutable, deterministic scorer over a fixed feature schema.
class Predictor {
 public:
  using BatchFunction = std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>;

  static Predictor constant(FeatureSchema schema, double value);
  static Predictor linear(LinearModel model);
  static Predictor kernel_ridge(FeatureSchema schema, KernelRidgeModel model);
  static Predictor external(FeatureSchema schema, std::vector<std::string> command);
  // Any in-process batch function, e.g. a hand-written test model.
  static Predictor function(FeatureSchema schema, BatchFunction fn);

  PredictorKind kind() const { return kind_; }
  const FeatureSchema& schema() const { return schema_; }
  // Non-null only for kLinear.
  const LinearModel* linear_model() const { return linear_.get(); }

  // One finite score per row. Throws DataError on schema mismatch, ScorerError
  // for external scorer failures, ModelError for non-finite scores.
  Eigen::VectorXd score(const Eigen::MatrixXd& rows) const;
  double score(const Observation& obs) const;

 private:
  Predictor(PredictorKind kind, FeatureSchema schema) : kind_(kind), schema_(std::move(schema)) {}

  PredictorKind kind_;
  FeatureSchema schema_;
  double constant_ = 0.0;
  std::shared_ptr<const LinearModel> linear_;
  std::shared_ptr<const KernelRidgeModel> kernel_;
  std::vector<std::string> command_;
  BatchFunction fn_;
};

Predictor fit_kernel_ridge(const Dataset& dataset, std::size_t response, double gamma,
                           double ridge);

// Predictor that spawns `command` once per batch. See subprocess.hpp for
// the wire protocol.
Predictor external_scorer(std::vector<std::string> command, FeatureSchema schema);

}  // namespace explain
