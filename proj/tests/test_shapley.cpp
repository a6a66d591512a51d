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

#include <algorithm>
#include <cmath>

#include "explain/error.hpp"
#include "explain/shapley.hpp"
#include "support.hpp"

using namespace explain;
using testing::numeric_dataset;
using testing::uniform_matrix;

namespace {

// Average marginal contribution over all p! orders.
Eigen::VectorXd all_orders(const RelaxedModel& model) {
  const std::size_t p = model.n_features();
  std::vector<std::size_t> order = testing::iota(p);
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  double count = 0;
  do {
    IndexSet s;
    double prev = model.relaxed_prediction(s);
    for (std::size_t j : order) {
      s = s.with(j);
      const double next = model.relaxed_prediction(s);
      phi(static_cast<Eigen::Index>(j)) += next - prev;
      prev = next;
    }
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  return phi / count;
}

Predictor nonlinear(const FeatureSchema& s) {
  return Predictor::function(s, [](const Eigen::MatrixXd& r) -> Eigen::VectorXd {
    Eigen::VectorXd out(r.rows());
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
      double v = std::tanh(r(i, 0));
      for (Eigen::Index j = 1; j < r.cols(); ++j) v += r(i, j) * r(i, 0) + 0.3 * r(i, j) * r(i, j);
      out(i) = v;
    }
    return out;
  });
}

}  // namespace

TEST_CASE("subset weights") {
  CHECK(shapley_weight(0, 1) == doctest::Approx(1.0));
  CHECK(shapley_weight(1, 3) == doctest::Approx(1.0 / 6.0));
  CHECK(shapley_weight(0, 3) == doctest::Approx(1.0 / 3.0));
  double total = 0;
  for (std::size_t s = 0; s < 15; ++s) {
    double binom = 1;
    for (std::size_t k = 0; k < s; ++k) binom = binom * static_cast<double>(14 - k) / static_cast<double>(k + 1);
    total += binom * shapley_weight(s, 15);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exact mode matches all-orders enumeration") {
  for (std::size_t p = 1; p <= 4; ++p) {
    const Dataset d = numeric_dataset(uniform_matrix(12, p, 300 + p));
    const RelaxedModel model(nonlinear(d.feature_schema()), d, Observation{uniform_matrix(1, p, 400 + p).row(0).transpose()});
    const Eigen::VectorXd phi = shapley_exact(model).values();
    CHECK((phi - all_orders(model)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("efficiency, symmetry and dummy") {
  Eigen::MatrixXd x = uniform_matrix(30, 5, 9);
  x.col(3) = x.col(1);
  const Dataset d = numeric_dataset(x);
  const FeatureSchema s = d.feature_schema();
  const Predictor f = Predictor::function(s, [](const Eigen::MatrixXd& r) -> Eigen::VectorXd {
    // Symmetric in features 1 and 3; ignores feature 4.
    Eigen::VectorXd out(r.rows());
    for (Eigen::Index i = 0; i < r.rows(); ++i)
      out(i) = r(i, 0) * (r(i, 1) + r(i, 3)) + std::sin(r(i, 2)) + r(i, 1) * r(i, 3);
    return out;
  });
  Eigen::VectorXd v(5);
  v << 0.4, -0.3, 0.8, -0.3, 0.6;
  const ShapleyEstimate est = shapley_exact(f, d, Observation{v});
  const Eigen::VectorXd phi = est.values();
  CHECK(std::abs(est.attribution.baseline + phi.sum() - f.score(Observation{v})) <= 1e-9);
  CHECK(std::abs(phi(1) - phi(3)) <= 1e-10);
  CHECK(std::abs(phi(4)) <= 1e-10);
}

TEST_CASE("additive model gives lm-break values") {
  const Dataset d = numeric_dataset(uniform_matrix(25, 4, 19));
  const Eigen::Vector4d beta(2, -1, 0.5, 0);
  const LinearModel m = LinearModel::from_parameters(d.feature_schema(), 1.0, beta, d.feature_matrix().colwise().mean());
  const Observation x_new{Eigen::Vector4d(0.1, 0.2, 0.3, 0.4)};
  const Eigen::VectorXd phi = shapley_exact(Predictor::linear(m), d, x_new).values();
  const Attribution lm = lm_break(m, x_new, BaselineMode::kIntercept);
  for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(phi(static_cast<Eigen::Index>(j)) - lm.contribution_of(j)) <= 1e-9);
}

TEST_CASE("constant predictor") {
  const Dataset d = numeric_dataset(uniform_matrix(8, 3, 2));
  const ShapleyEstimate est = shapley_exact(Predictor::constant(d.feature_schema(), 4.0), d, d.observation(1));
  CHECK(est.values().cwiseAbs().maxCoeff() == 0.0);
  CHECK(est.attribution.baseline == 4.0);
}

TEST_CASE("the feature cap") {
  const Dataset d = numeric_dataset(uniform_matrix(4, 16, 2));
  CHECK_THROWS_AS(shapley_exact(Predictor::constant(d.feature_schema(), 0.0), d, d.observation(0)), ModelError);
  ShapleyOptions small;
  small.max_features = 3;
  const Dataset d4 = numeric_dataset(uniform_matrix(4, 4, 2));
  CHECK_THROWS_AS(shapley_exact(Predictor::constant(d4.feature_schema(), 0.0), d4, d4.observation(0), small),
                  ModelError);
}

TEST_CASE("sampled mode") {
  SUBCASE("p = 1 equals exact") {
    const Dataset d = numeric_dataset(uniform_matrix(10, 1, 6));
    const RelaxedModel model(nonlinear(d.feature_schema()), d, d.observation(0));
    Rng rng = make_rng(1);
    const ShapleyEstimate s = shapley_sampled(model, 7, rng);
    CHECK(std::abs(s.values()(0) - shapley_exact(model).values()(0)) <= 1e-12);
  }
  SUBCASE("seeded runs are identical") {
    const Dataset d = numeric_dataset(uniform_matrix(20, 4, 7));
    const RelaxedModel model(nonlinear(d.feature_schema()), d, d.observation(0));
    Rng a = make_rng(42), b = make_rng(42);
    const ShapleyEstimate x = shapley_sampled(model, 50, a), y = shapley_sampled(model, 50, b);
    CHECK(x.values() == y.values());
    CHECK(*x.std_errors == *y.std_errors);
  }
  SUBCASE("estimates sum exactly and stay near exact values") {
    const Dataset d = numeric_dataset(uniform_matrix(20, 4, 8));
    const RelaxedModel model(nonlinear(d.feature_schema()), d, d.observation(3));
    Rng rng = make_rng(5);
    const ShapleyEstimate s = shapley_sampled(model, 400, rng);
    CHECK(std::abs(s.attribution.baseline + s.values().sum() - model.prediction()) <= 1e-9);
    REQUIRE(s.unadjusted);
    REQUIRE(s.std_errors);
    CHECK((s.std_errors->array() >= 0).all());
    const Eigen::VectorXd exact = shapley_exact(model).values();
    for (Eigen::Index j = 0; j < 4; ++j)
      CHECK(std::abs((*s.unadjusted)(j) - exact(j)) <= 4 * (*s.std_errors)(j) + 1e-12);
    CHECK(s.n_permutations == 400);
  }
  SUBCASE("too few permutations") {
    const Dataset d = numeric_dataset(uniform_matrix(5, 2, 8));
    Rng rng = make_rng(5);
    CHECK_THROWS_AS(shapley_sampled(Predictor::constant(d.feature_schema(), 1.0), d, d.observation(0), 1, rng),
                    UsageError);
  }
}
