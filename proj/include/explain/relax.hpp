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

// Relaxed predictions.
//
// For a set F of "fixed" features, the relaxed prediction of x_new is
//
//   f^F(x_new) = 1/n sum_i f(hybrid_i),
//
// where hybrid_i is training row i with its F coordinates overwritten by
// x_new's values. Features outside F are "relaxed": they follow the data.
// f^{all}(x_new) = f(x_new) and f^{} = mean training score.

#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "explain/predict.hpp"
#include "explain/tabular.hpp"

namespace explain {

// Sorted set of 0-based feature indices.
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::initializer_list<std::size_t> members);
  explicit IndexSet(std::vector<std::size_t> members);

  static IndexSet all(std::size_t p);
  // Members are the set bits of `mask`.
  static IndexSet from_mask(std::uint64_t mask, std::size_t p);

  bool contains(std::size_t j) const;
  IndexSet with(std::size_t j) const;
  IndexSet without(std::size_t j) const;
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const std::vector<std::size_t>& members() const { return members_; }

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::vector<std::size_t> members_;
};

struct RelaxOptions {
  // Average over this many rows drawn without replacement instead of all n.
  // Off by default; the estimator is exact over the full dataset.
  std::optional<std::size_t> subsample_rows;
  std::uint64_t subsample_seed = 0;
  // Worker cap for candidate evaluations.
  std::size_t threads = 1;
};

// Binds a predictor, the background rows and x_new. All queries are pure.
class RelaxedModel {
 public:
  RelaxedModel(const Predictor& predictor, const Dataset& dataset, Observation x_new,
               const RelaxOptions& options = {});

  std::size_t n_features() const { return static_cast<std::size_t>(background_.cols()); }
  std::size_t n_rows() const { return static_cast<std::size_t>(background_.rows()); }
  const Predictor& predictor() const { return predictor_; }
  const Observation& x_new() const { return x_new_; }
  const RelaxOptions& options() const { return options_; }

  // f(x_new).
  double prediction() const { return prediction_; }
  // Scores of all hybrid rows for `fixed`.
  Eigen::VectorXd scores(const IndexSet& fixed) const;
  // Mean of scores(fixed).
  double relaxed_prediction(const IndexSet& fixed) const;

 private:
  Predictor predictor_;
  Eigen::MatrixXd background_;
  Observation x_new_;
  RelaxOptions options_;
  double prediction_ = 0.0;
};

double relaxed_prediction(const Predictor& predictor, const Dataset& dataset,
                          const Observation& x_new, const IndexSet& fixed,
                          const RelaxOptions& options = {});

// |f^fixed(x_new) - f(x_new)|.
double relaxed_distance(const Predictor& predictor, const Dataset& dataset,
                        const Observation& x_new, const IndexSet& fixed,
                        const RelaxOptions& options = {});

// f^{fixed + j}(x_new) - f^fixed(x_new). Throws UsageError if j is in fixed.
double added_contribution(const Predictor& predictor, const Dataset& dataset,
                          const Observation& x_new, const IndexSet& fixed, std::size_t j,
                          const RelaxOptions& options = {});

enum class Direction { kUp, kDown };

const char* to_string(Direction d);

struct TraceStep {
  IndexSet fixed;
  // Feature released (Down) or pinned (Up) to reach this step; none on the
  // first step.
  std::optional<std::size_t> relaxed_feature;
  Eigen::VectorXd scores;
  double mean = 0.0;
};

struct RelaxationTrace {
  Direction direction = Direction::kDown;
  std::vector<std::string> feature_names;
  std::vector<TraceStep> steps;
};

// Down walks fixed = all -> {} removing `order` front to back; Up walks
// {} -> all adding in `order`. `order` must be a permutation of 0..p-1.
RelaxationTrace relaxation_trace(const RelaxedModel& model, const std::vector<std::size_t>& order,
                                 Direction direction);
RelaxationTrace relaxation_trace(const Predictor& predictor, const Dataset& dataset,
                                 const Observation& x_new, const std::vector<std::size_t>& order,
                                 Direction direction, const RelaxOptions& options = {});

}  // namespace explain
