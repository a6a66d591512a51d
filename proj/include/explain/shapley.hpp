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

// Shapley attributions over the relaxed-prediction value function
// v(S) = f^S(x_new):
//
//   phi_j = sum_{S not containing j} |S|! (p-|S|-1)! / p! [v(S+j) - v(S)],
//   phi_0 = v({}).

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "explain/breakdown.hpp"
#include "explain/random.hpp"
#include "explain/relax.hpp"

namespace explain {

struct ShapleyOptions {
  // Exact mode evaluates 2^p relaxed predictions.
  std::size_t max_features = 15;
  BaselineMode baseline_mode = BaselineMode::kIntercept;
};

struct ShapleyEstimate {
  Attribution attribution;
  // Sampled mode only: per-feature sample std / sqrt(n_permutations), and
  // the estimates before the residual was redistributed.
  std::optional<Eigen::VectorXd> std_errors;
  std::optional<Eigen::VectorXd> unadjusted;
  std::size_t n_permutations = 0;

  // phi_j in feature order.
  Eigen::VectorXd values() const;
};

// Subset weight |S|! (p-|S|-1)! / p! via log-factorials.
double shapley_weight(std::size_t subset_size, std::size_t p);

ShapleyEstimate shapley_exact(const RelaxedModel& model, const ShapleyOptions& options = {});
ShapleyEstimate shapley_exact(const Predictor& predictor, const Dataset& dataset,
                              const Observation& x_new, const ShapleyOptions& options = {},
                              const RelaxOptions& relax = {});

// Averages marginal contributions over uniformly drawn feature orderings.
// The averaged phi are then shifted so phi_0 + sum phi = f(x_new) by spreading
// the residual proportionally to |phi_j|; `unadjusted` keeps the raw means.
ShapleyEstimate shapley_sampled(const RelaxedModel& model, std::size_t n_permutations, Rng& rng,
                                const ShapleyOptions& options = {});
ShapleyEstimate shapley_sampled(const Predictor& predictor, const Dataset& dataset,
                                const Observation& x_new, std::size_t n_permutations, Rng& rng,
                                const ShapleyOptions& options = {}, const RelaxOptions& relax = {});

}  // namespace explain
