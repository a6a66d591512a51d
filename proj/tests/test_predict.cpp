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

#include <cmath>

#include "explain/error.hpp"
#include "explain/predict.hpp"
#include "support.hpp"

using namespace explain;
using testing::numeric_dataset;
using testing::uniform_matrix;

namespace {

FeatureSchema numeric_schema(std::size_t p) {
  FeatureSchema s;
  for (std::size_t j = 0; j < p; ++j) {
    s.names.push_back("x" + std::to_string(j + 1));
    s.kinds.push_back(ColumnKind::kNumeric);
    s.levels.emplace_back();
  }
  return s;
}

}  // namespace

TEST_CASE("OLS on exact linear data") {
  Eigen::MatrixXd x(4, 1);
  x << 0, 1, 2, 3;
  const Eigen::VectorXd y = (2.0 * x.col(0)).array() + 1.0;
  const LinearModel m = fit_ols(numeric_dataset(x, y), 1);
  CHECK(m.intercept == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.coefficients(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(m.residual_variance == doctest::Approx(0.0).epsilon(1e-20));
}

TEST_CASE("OLS on a constant response") {
  const Eigen::MatrixXd x = uniform_matrix(20, 2, 3);
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(20, 4.0);
  const LinearModel m = fit_ols(numeric_dataset(x, y), 2);
  CHECK(m.intercept == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(std::abs(m.coefficients(0)) < 1e-12);
  CHECK(std::abs(m.coefficients(1)) < 1e-12);
}

TEST_CASE("OLS recovers noiseless coefficients") {
  const Eigen::MatrixXd x = uniform_matrix(200, 2, 11);
  const Eigen::VectorXd y = (3.0 * x.col(0) - x.col(1)).array() + 0.5;
  const LinearModel m = fit_ols(numeric_dataset(x, y), 2);
  CHECK(std::abs(m.coefficients(0) - 3.0) < 1e-10);
  CHECK(std::abs(m.coefficients(1) + 1.0) < 1e-10);
  CHECK(std::abs(m.intercept - 0.5) < 1e-10);
  REQUIRE(m.std_errors);
  CHECK(m.std_errors->size() == 2);
  CHECK((m.std_errors->array() >= 0).all());
}

TEST_CASE("OLS residuals sum to zero and score matches the formula") {
  const Dataset wine = testing::load_wine();
  const std::size_t resp = *wine.response_index();
  const LinearModel m = fit_ols(wine, resp);
  const Eigen::MatrixXd rows = wine.feature_matrix();
  const Eigen::VectorXd fitted = m.score(rows);
  const Eigen::VectorXd y = wine.response();
  CHECK(std::abs((y - fitted).sum()) < 1e-9 * y.cwiseAbs().maxCoeff() * static_cast<double>(y.size()));
  for (Eigen::Index i = 0; i < 50; ++i) {
    const double direct = m.intercept + m.coefficients.dot(rows.row(i).transpose());
    CHECK(std::abs(fitted(i) - direct) < 1e-12);
  }
  CHECK(m.means.size() == 11);
  CHECK(m.std_errors->size() == 11);
}

TEST_CASE("OLS errors") {
  SUBCASE("too few rows") {
    Eigen::MatrixXd x(2, 1);
    x << 0, 1;
    Eigen::VectorXd y(2);
    y << 1, 2;
    CHECK_THROWS_AS(fit_ols(numeric_dataset(x, y), 1), ModelError);
  }
  SUBCASE("rank deficiency names the column") {
    Eigen::MatrixXd x = uniform_matrix(30, 3, 8);
    x.col(2) = 2.0 * x.col(0) - x.col(1);
    const Eigen::VectorXd y = x.col(0);
    try {
      fit_ols(numeric_dataset(x, y), 3);
      FAIL("expected a rank deficiency");
    } catch (const RankDeficiencyError& e) {
      CHECK(e.column() == "x3");
    }
  }
}

TEST_CASE("categorical features are one-hot encoded") {
  const Dataset d = parse_csv("x,c,y\n1,a,2\n2,b,5\n3,c,9\n4,a,5\n5,b,8\n6,c,12\n7,a,8\n", [] {
    CsvOptions o;
    o.response_name = "y";
    return o;
  }());
  const LinearModel m = fit_ols(d, 2);
  CHECK(m.encoder.encoded_names() == std::vector<std::string>{"x", "c=b", "c=c"});
  CHECK(m.coefficients.size() == 3);
  const Eigen::VectorXd fitted = m.score(d.feature_matrix());
  CHECK((fitted - d.response()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("predictor kinds") {
  const FeatureSchema s = numeric_schema(1);
  SUBCASE("constant") {
    const Predictor c = Predictor::constant(s, 5.61);
    Eigen::MatrixXd rows(3, 1);
    rows << 1, 2, 3;
    CHECK((c.score(rows).array() == 5.61).all());
  }
  SUBCASE("linear from parameters") {
    const Predictor lin =
        Predictor::linear(LinearModel::from_parameters(s, 1.0, Eigen::VectorXd::Constant(1, 2.0),
                                                       Eigen::VectorXd::Constant(1, 0.3)));
    CHECK(lin.score(Observation{Eigen::VectorXd::Constant(1, 3.0)}) == 7.0);
  }
  SUBCASE("empty batch") {
    const Predictor c = Predictor::constant(s, 1.0);
    CHECK(c.score(Eigen::MatrixXd(0, 1)).size() == 0);
  }
  SUBCASE("schema mismatch") {
    const Predictor c = Predictor::constant(s, 1.0);
    CHECK_THROWS_AS(c.score(Eigen::MatrixXd::Zero(2, 3)), DataError);
  }
}

TEST_CASE("kernel ridge") {
  SUBCASE("ridge shrinks training predictions") {
    Eigen::MatrixXd x(3, 1);
    x << -1, 0, 2;
    Eigen::VectorXd y(3);
    y << 1, -2, 4;
    const Predictor kr = fit_kernel_ridge(numeric_dataset(x, y), 1, 0.5, 0.1);
    const Eigen::VectorXd pred = kr.score(x);
    for (int i = 0; i < 3; ++i) CHECK(pred(i) != doctest::Approx(y(i)).epsilon(1e-6));
  }
  SUBCASE("symmetric two-point data") {
    Eigen::MatrixXd x(2, 1);
    x << -1, 1;
    Eigen::VectorXd y(2);
    y << -1, 1;
    const Predictor kr = fit_kernel_ridge(numeric_dataset(x, y), 1, 0.7, 0.01);
    CHECK(std::abs(kr.score(Observation{Eigen::VectorXd::Zero(1)})) < 1e-12);
  }
  SUBCASE("matches a direct dense solve") {
    const Eigen::MatrixXd x = uniform_matrix(50, 3, 21);
    Eigen::VectorXd y(50);
    for (int i = 0; i < 50; ++i) y(i) = std::sin(3 * x(i, 0)) + x(i, 1) * x(i, 2);
    const double gamma = 0.5, ridge = 1e-3;
    const Predictor kr = fit_kernel_ridge(numeric_dataset(x, y), 3, gamma, ridge);

    // Oracle: standardize with sample statistics, centre y, solve densely.
    const Eigen::RowVectorXd mean = x.colwise().mean();
    Eigen::RowVectorXd sd(3);
    for (int j = 0; j < 3; ++j) sd(j) = std::sqrt((x.col(j).array() - mean(j)).square().sum() / 49.0);
    const Eigen::MatrixXd z = (x.rowwise() - mean).array().rowwise() / sd.array();
    Eigen::MatrixXd k(50, 50);
    for (int i = 0; i < 50; ++i)
      for (int l = 0; l < 50; ++l) k(i, l) = std::exp(-gamma * (z.row(i) - z.row(l)).squaredNorm());
    const double ybar = y.mean();
    const Eigen::VectorXd alpha =
        (k + ridge * Eigen::MatrixXd::Identity(50, 50)).fullPivLu().solve((y.array() - ybar).matrix());
    const Eigen::MatrixXd test = uniform_matrix(20, 3, 22);
    const Eigen::VectorXd got = kr.score(test);
    for (int t = 0; t < 20; ++t) {
      const Eigen::RowVectorXd zt = (test.row(t) - mean).array() / sd.array();
      double f = ybar;
      for (int i = 0; i < 50; ++i) f += alpha(i) * std::exp(-gamma * (zt - z.row(i)).squaredNorm());
      CHECK(std::abs(got(t) - f) < 1e-8);
    }
  }
  SUBCASE("training error falls as ridge shrinks") {
    const Eigen::MatrixXd x = uniform_matrix(30, 2, 4);
    Eigen::VectorXd y(30);
    for (int i = 0; i < 30; ++i) y(i) = x(i, 0) * x(i, 0) - x(i, 1);
    const Dataset d = numeric_dataset(x, y);
    double previous = INFINITY;
    for (double ridge : {1e-2, 1e-4, 1e-6}) {
      const double err = std::abs(fit_kernel_ridge(d, 2, 1.0, ridge).score(x)(0) - y(0));
      CHECK(err < previous);
      previous = err;
    }
  }
  SUBCASE("categorical features are rejected") {
    const Dataset d = parse_csv("c,y\na,1\nb,2\n", [] {
      CsvOptions o;
      o.response_name = "y";
      return o;
    }());
    CHECK_THROWS_AS(fit_kernel_ridge(d, 1, 1.0, 1.0), Error);
  }
}

TEST_CASE("batch scoring equals row-by-row scoring") {
  const Eigen::MatrixXd x = uniform_matrix(40, 3, 31);
  const Eigen::VectorXd y = (x.col(0) + x.col(1).cwiseProduct(x.col(2))).array() + 2.0;
  const Dataset d = numeric_dataset(x, y);
  const FeatureSchema schema = d.feature_schema();
  const std::vector<Predictor> predictors = {
      Predictor::constant(schema, 1.25),
      Predictor::linear(fit_ols(d, 3)),
      fit_kernel_ridge(d, 3, 0.3, 0.05),
      Predictor::function(schema, [](const Eigen::MatrixXd& r) -> Eigen::VectorXd {
        return r.col(0).cwiseProduct(r.col(1));
      }),
      external_scorer({EXPLAIN_FIXTURE_LINEAR, "0.5", "1", "-2", "3"}, schema),
  };
  for (const auto& p : predictors) {
    const Eigen::VectorXd batch = p.score(x);
    for (Eigen::Index i = 0; i < 10; ++i) CHECK(batch(i) == p.score(Observation{x.row(i).transpose()}));
  }
}
