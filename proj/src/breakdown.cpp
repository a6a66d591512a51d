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

#include "explain/breakdown.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "explain/error.hpp"
#include "explain/parallel.hpp"

namespace explain {

namespace {

std::string fixed3(double v) {
  std::string s = fmt::format("{:.3f}", v);
  if (s == "-0.000") s = "0.000";
  return s;
}

AttributionEntry intercept_entry(double value) {
  return AttributionEntry{"intercept", std::nullopt, std::monostate{}, value};
}

}  // namespace

const char* to_string(BaselineMode mode) { return mode == BaselineMode::kZero ? "zero" : "intercept"; }

const char* to_string(AttributionMethod method) {
  switch (method) {
    case AttributionMethod::kLmBreak: return "lm-break";
    case AttributionMethod::kAgBreakUp: return "ag-break-up";
    case AttributionMethod::kAgBreakDown: return "ag-break-down";
    case AttributionMethod::kShapleyExact: return "shapley-exact";
    case AttributionMethod::kShapleySampled: return "shapley-sampled";
  }
  return "unknown";
}

double Attribution::contribution_sum() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.contribution;
  return s;
}

double Attribution::contribution_of(std::size_t feature) const {
  bool found = false;
  double s = 0.0;
  for (const auto& e : entries) {
    if (e.feature_index == feature) {
      s += e.contribution;
      found = true;
    }
  }
  if (!found) throw DataError(fmt::format("feature {} is not in the attribution", feature));
  return s;
}

std::vector<AttributionEntry> Attribution::importance_order() const {
  std::vector<AttributionEntry> out = entries;
  std::stable_sort(out.begin(), out.end(), [](const AttributionEntry& a, const AttributionEntry& b) {
    if (a.is_intercept() != b.is_intercept()) return a.is_intercept();
    return std::abs(a.contribution) > std::abs(b.contribution);
  });
  return out;
}

CellValue cell_value(const FeatureSchema& schema, std::size_t feature, double cell) {
  if (schema.kinds.at(feature) == ColumnKind::kCategorical) return schema.format_cell(feature, cell);
  return cell;
}

std::string to_display(const CellValue& value) {
  if (const double* d = std::get_if<double>(&value)) return format_number(*d);
  if (const std::string* s = std::get_if<std::string>(&value)) return *s;
  return "";
}

std::string format_attribution(const Attribution& attribution, EntryOrder order) {
  const auto entries =
      order == EntryOrder::kImportance ? attribution.importance_order() : attribution.entries;
  std::vector<std::pair<std::string, std::string>> rows;
  rows.emplace_back("baseline", fixed3(attribution.baseline));
  for (const auto& e : entries) {
    std::string label = e.is_intercept() ? std::string("intercept")
                                         : fmt::format("+ {} = {}", e.feature, to_display(e.value));
    rows.emplace_back(std::move(label), fixed3(e.contribution));
  }
  rows.emplace_back("final_prognosis", fixed3(attribution.final_prediction));

  std::size_t label_width = 0;
  std::size_t value_width = std::string("contribution").size();
  for (const auto& [l, v] : rows) {
    label_width = std::max(label_width, l.size());
    value_width = std::max(value_width, v.size());
  }
  std::string out = fmt::format("{:<{}}  {:>{}}\n", "", label_width, "contribution", value_width);
  for (const auto& [l, v] : rows) out += fmt::format("{:<{}}  {:>{}}\n", l, label_width, v, value_width);
  return out;
}

Attribution lm_break(const LinearModel& model, const Observation& x_new, BaselineMode baseline_mode) {
  const FeatureSchema& schema = model.encoder.schema();
  if (x_new.size() != schema.size())
    throw DataError(fmt::format("observation has {} values, model expects {}", x_new.size(), schema.size()));
  const Eigen::VectorXd enc = model.encoder.encode(x_new);

  double baseline = model.intercept;
  std::vector<double> contrib(schema.size(), 0.0);
  for (Eigen::Index k = 0; k < enc.size(); ++k) {
    baseline += model.means(k) * model.coefficients(k);
    contrib[model.encoder.source_feature(static_cast<std::size_t>(k))] +=
        (enc(k) - model.means(k)) * model.coefficients(k);
  }

  Attribution a;
  a.method = AttributionMethod::kLmBreak;
  a.baseline_mode = baseline_mode;
  a.final_prediction = model.score(x_new);
  std::vector<AttributionEntry> features;
  for (std::size_t j = 0; j < schema.size(); ++j)
    features.push_back({schema.names[j], j, cell_value(schema, j, x_new.values[static_cast<Eigen::Index>(j)]),
                        contrib[j]});
  std::stable_sort(features.begin(), features.end(), [](const auto& l, const auto& r) {
    return std::abs(l.contribution) > std::abs(r.contribution);
  });
  if (baseline_mode == BaselineMode::kIntercept) {
    a.baseline = baseline;
  } else {
    a.baseline = 0.0;
    a.entries.push_back(intercept_entry(baseline));
  }
  a.entries.insert(a.entries.end(), features.begin(), features.end());
  return a;
}

Attribution ag_break(const RelaxedModel& model, const AgBreakOptions& options) {
  const std::size_t p = model.n_features();
  const FeatureSchema& schema = model.predictor().schema();
  const double f_new = model.prediction();
  const std::size_t threads = model.options().threads;

  struct Step {
    std::size_t feature;
    double contribution;
  };
  std::vector<Step> path;  // in the order features were chosen
  double f_empty = 0.0;

  if (options.direction == Direction::kDown) {
    IndexSet fixed = IndexSet::all(p);
    double current = f_new;
    for (std::size_t step = 0; step < p; ++step) {
      const auto& cand = fixed.members();
      const auto values = parallel_map<double>(cand.size(), threads, [&](std::size_t i) {
        return model.relaxed_prediction(fixed.without(cand[i]));
      });
      std::size_t best = 0;
      for (std::size_t i = 1; i < cand.size(); ++i)
        if (std::abs(values[i] - f_new) < std::abs(values[best] - f_new)) best = i;
      path.push_back({cand[best], current - values[best]});
      current = values[best];
      fixed = fixed.without(cand[best]);
    }
    f_empty = current;
    if (p == 0) f_empty = model.relaxed_prediction(IndexSet{});
  } else {
    IndexSet fixed;
    f_empty = model.relaxed_prediction(fixed);
    const double target = options.up_distance == UpDistance::kToBaseline ? f_empty : f_new;
    double current = f_empty;
    for (std::size_t step = 0; step < p; ++step) {
      std::vector<std::size_t> cand;
      for (std::size_t j = 0; j < p; ++j)
        if (!fixed.contains(j)) cand.push_back(j);
      const auto values = parallel_map<double>(cand.size(), threads, [&](std::size_t i) {
        return model.relaxed_prediction(fixed.with(cand[i]));
      });
      std::size_t best = 0;
      for (std::size_t i = 1; i < cand.size(); ++i)
        if (std::abs(values[i] - target) > std::abs(values[best] - target)) best = i;
      path.push_back({cand[best], values[best] - current});
      current = values[best];
      fixed = fixed.with(cand[best]);
    }
  }

  Attribution a;
  a.method = options.direction == Direction::kUp ? AttributionMethod::kAgBreakUp
                                                 : AttributionMethod::kAgBreakDown;
  a.baseline_mode = options.baseline_mode;
  a.final_prediction = f_new;
  if (options.baseline_mode == BaselineMode::kIntercept) {
    a.baseline = f_empty;
  } else {
    a.baseline = 0.0;
    a.entries.push_back(intercept_entry(f_empty));
  }
  if (options.direction == Direction::kDown) std::reverse(path.begin(), path.end());
  for (const auto& s : path)
    a.entries.push_back({schema.names[s.feature], s.feature,
                         cell_value(schema, s.feature, model.x_new().values[static_cast<Eigen::Index>(s.feature)]),
                         s.contribution});
  return a;
}

Attribution ag_break(const Predictor& predictor, const Dataset& dataset, const Observation& x_new,
                     const AgBreakOptions& options, const RelaxOptions& relax) {
  return ag_break(RelaxedModel(predictor, dataset, x_new, relax), options);
}

std::vector<std::size_t> selection_order(const Attribution& attribution) {
  std::vector<std::size_t> order;
  for (const auto& e : attribution.entries)
    if (e.feature_index) order.push_back(*e.feature_index);
  if (attribution.method == AttributionMethod::kAgBreakDown) std::reverse(order.begin(), order.end());
  return order;
}

}  // namespace explain
