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


#include <doctest.h>

#include <filesystem>

#include "explain/error.hpp"
#include "explain/json_io.hpp"
#include "golden_cases.hpp"

using namespace explain;

TEST_CASE("attribution JSON") {
  Attribution a;
  a.method = AttributionMethod::kAgBreakDown;
  a.baseline_mode = BaselineMode::kIntercept;
  a.baseline = 5.613;
  a.entries = {{"alcohol", 10, 9.4, -0.318}};
  a.final_prediction = 5.295;
  const std::string text = canonical_dump(to_json(a));
  CHECK(text.find("-0.318") != std::string::npos);
  CHECK(text.find("\"method\": \"ag-break-down\"") != std::string::npos);
  CHECK(text.back() == '\n');
  // Keys come out sorted.
  CHECK(text.find("\"baseline\"") < text.find("\"entries\""));
  CHECK(text.find("\"entries\"") < text.find("\"final_prediction\""));
  CHECK(text.find("\"final_prediction\"") < text.find("\"method\""));
  CHECK(canonical_dump(to_json(a)) == text);
}

TEST_CASE("intercept entries have a null value") {
  Attribution a;
  a.entries = {{"intercept", std::nullopt, std::monostate{}, 5.0}};
  const Json j = to_json(a);
  CHECK(j["entries"][0]["value"].is_null());
}

TEST_CASE("shapley JSON carries sampling details") {
  const Dataset d = testing::numeric_dataset(testing::uniform_matrix(10, 2, 3));
  const Predictor f = Predictor::function(d.feature_schema(), [](const Eigen::MatrixXd& r) -> Eigen::VectorXd {
    return r.col(0).cwiseProduct(r.col(1));
  });
  Rng rng = make_rng(42);
  const Json sampled = to_json(shapley_sampled(f, d, d.observation(0), 10, rng));
  CHECK(sampled["n_permutations"] == 10);
  CHECK(sampled["std_errors"].size() == 2);
  const Json exact = to_json(shapley_exact(f, d, d.observation(0)));
  CHECK(!exact.contains("std_errors"));
}

TEST_CASE("trace JSON") {
  RelaxationTrace t;
  t.direction = Direction::kDown;
  t.feature_names = {"a", "b"};
  t.steps.push_back({IndexSet{0, 1}, std::nullopt, Eigen::Vector2d(1, 1), 1.0});
  const Json j = to_json(t);
  CHECK(j["direction"] == "down");
  CHECK(j["steps"].size() == 1);
  CHECK(j["steps"][0]["fixed"] == Json::array({1, 2}));
  CHECK(j["steps"][0]["relaxed_feature"].is_null());
}

TEST_CASE("surrogate JSON") {
  const FeatureSchema s{{"a"}, {ColumnKind::kNumeric}, {{}}};
  SurrogateFit fit;
  fit.model = LinearModel::from_parameters(s, 1.0, Eigen::VectorXd::Constant(1, 2.0), Eigen::VectorXd::Zero(1));
  fit.selected_features = {"a"};
  fit.r2 = 1.0;
  const Json j = to_json(fit);
  CHECK(j["white_box"] == "ols");
  CHECK(j["coefficients"][0]["feature"] == "a");
  CHECK(j["coefficients"][0]["std_error"].is_null());
}

TEST_CASE("export is byte stable") {
  const auto dir = std::filesystem::temp_directory_path() / "explain_json_test";
  std::filesystem::create_directories(dir);
  Attribution a;
  a.entries = {{"x", 0, 0.1, 0.30000000000000004}};
  export_json(to_json(a), dir / "a.json");
  export_json(to_json(a), dir / "b.json");
  const std::string first = testing::read_file((dir / "a.json").string());
  CHECK(first == testing::read_file((dir / "b.json").string()));
  CHECK(first.find("0.30000000000000004") != std::string::npos);
  CHECK_THROWS_AS(export_json(to_json(a), dir / "missing" / "c.json"), Error);
  std::filesystem::remove_all(dir);
}
