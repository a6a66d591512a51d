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

#include "explain/json_io.hpp"

#include <fstream>

#include <fmt/format.h>

#include "explain/error.hpp"

namespace explain {

namespace {

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json cell_json(const CellValue& value) {
  if (const double* d = std::get_if<double>(&value)) return *d;
  if (const std::string* s = std::get_if<std::string>(&value)) return *s;
  return nullptr;
}

}  // namespace

Json to_json(const Attribution& attribution) {
  Json entries = Json::array();
  for (const auto& e : attribution.entries)
    entries.push_back({{"feature", e.feature}, {"value", cell_json(e.value)}, {"contribution", e.contribution}});
  return {{"method", to_string(attribution.method)},
          {"baseline_mode", to_string(attribution.baseline_mode)},
          {"baseline", attribution.baseline},
          {"entries", std::move(entries)},
          {"final_prediction", attribution.final_prediction}};
}

Json to_json(const ShapleyEstimate& estimate) {
  Json out = to_json(estimate.attribution);
  if (estimate.std_errors) {
    out["std_errors"] = vector_json(*estimate.std_errors);
    out["n_permutations"] = estimate.n_permutations;
  }
  if (estimate.unadjusted) out["unadjusted"] = vector_json(*estimate.unadjusted);
  return out;
}

Json to_json(const SurrogateFit& fit) {
  const LinearModel& m = fit.model;
  const auto names = m.encoder.encoded_names();
  Json coefs = Json::array();
  for (Eigen::Index k = 0; k < m.coefficients.size(); ++k) {
    Json c = {{"feature", names[static_cast<std::size_t>(k)]}, {"estimate", m.coefficients(k)}};
    c["std_error"] = m.std_errors ? Json((*m.std_errors)(k)) : Json(nullptr);
    coefs.push_back(std::move(c));
  }
  Json out = {{"white_box", fit.white_box == WhiteBox::kOls ? "ols" : "lasso"},
              {"lambda", fit.lambda},
              {"intercept", m.intercept},
              {"coefficients", std::move(coefs)},
              {"selected_features", fit.selected_features},
              {"r2", fit.r2}};
  out["intercept_std_error"] = m.intercept_std_error ? Json(*m.intercept_std_error) : Json(nullptr);
  return out;
}

Json to_json(const RelaxationTrace& trace) {
  Json steps = Json::array();
  for (const auto& st : trace.steps) {
    Json fixed = Json::array();
    for (std::size_t j : st.fixed.members()) fixed.push_back(j + 1);
    steps.push_back({{"fixed", std::move(fixed)},
                     {"relaxed_feature", st.relaxed_feature ? Json(*st.relaxed_feature + 1) : Json(nullptr)},
                     {"scores", vector_json(st.scores)},
                     {"mean", st.mean}});
  }
  return {{"direction", to_string(trace.direction)}, {"features", trace.feature_names}, {"steps", std::move(steps)}};
}

std::string canonical_dump(const Json& value) { return value.dump(2) + "\n"; }

void export_json(const Json& value, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
  out << canonical_dump(value);
  out.flush();
  if (!out) throw Error(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace explain
