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

// Additive decompositions of a single prediction:
//
//   f(x_new) = baseline + sum_j contribution_j.
//
// lm_break reads the decomposition off a linear model. ag_break builds it
// greedily from relaxed predictions and works for any predictor.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "explain/predict.hpp"
#include "explain/relax.hpp"

namespace explain {

enum class BaselineMode { kZero, kIntercept };
enum class AttributionMethod { kLmBreak, kAgBreakUp, kAgBreakDown, kShapleyExact, kShapleySampled };

const char* to_string(BaselineMode mode);
const char* to_string(AttributionMethod method);

using CellValue = std::variant<std::monostate, double, std::string>;

struct AttributionEntry {
  std::string feature;
  // None for the synthetic "intercept" entry of zero-baseline attributions.
  std::optional<std::size_t> feature_index;
  CellValue value;
  double contribution = 0.0;

  bool is_intercept() const { return !feature_index.has_value(); }
};

// baseline + sum of contributions == final_prediction == f(x_new). Every
// feature appears exactly once; a zero baseline adds one intercept entry
// carrying the mean prediction.
struct Attribution {
  AttributionMethod method = AttributionMethod::kLmBreak;
  BaselineMode baseline_mode = BaselineMode::kZero;
  double baseline = 0.0;
  std::vector<AttributionEntry> entries;
  double final_prediction = 0.0;

  double contribution_sum() const;
  // Contribution of feature j, summed over its entries (one for valid
  // attributions). Throws if the feature is absent.
  double contribution_of(std::size_t feature) const;
  // Intercept first, then features by decreasing |contribution|; ties keep
  // their current order.
  std::vector<AttributionEntry> importance_order() const;
};

enum class EntryOrder { kGiven, kImportance };

// Aligned text layout:
//
//                        contribution
//   baseline                    5.613
//   + alcohol = 9.4            -0.318
//   final_prognosis             5.032
std::string format_attribution(const Attribution& attribution, EntryOrder order = EntryOrder::kGiven);

// Display value of a cell, for entry labels.
CellValue cell_value(const FeatureSchema& schema, std::size_t feature, double cell);
std::string to_display(const CellValue& value);

// Contribution of feature i is (x_new_i - mean_i) * beta_i, summed over the
// indicator columns of categorical features. Entries by decreasing
// |contribution|.
Attribution lm_break(const LinearModel& model, const Observation& x_new,
                     BaselineMode baseline_mode = BaselineMode::kZero);

// Step-up scoring of a candidate: distance to the fully relaxed prediction
// (default) or to f(x_new).
enum class UpDistance { kToBaseline, kToPrediction };

struct AgBreakOptions {
  Direction direction = Direction::kUp;
  BaselineMode baseline_mode = BaselineMode::kZero;
  UpDistance up_distance = UpDistance::kToBaseline;
};

// Greedy decomposition. Down: starting from every feature fixed, repeatedly
// release the feature whose release keeps the relaxed prediction closest to
// f(x_new). Up: starting from nothing fixed, repeatedly pin the feature that
// moves the relaxed prediction furthest from f^{}. Ties go to the lowest
// feature index. Entries follow the path from f^{} to f(x_new): selection
// order for Up, reverse removal order for Down.
Attribution ag_break(const RelaxedModel& model, const AgBreakOptions& options = {});
Attribution ag_break(const Predictor& predictor, const Dataset& dataset, const Observation& x_new,
                     const AgBreakOptions& options = {}, const RelaxOptions& relax = {});

// Features of an ag-break attribution in the order the greedy search chose
// them: removal order for Down, selection order for Up. This is the order
// relaxation_trace expects.
std::vector<std::size_t> selection_order(const Attribution& attribution);

}  // namespace explain
