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

// Cyclic coordinate descent for the lasso
//
//   min_{mu, beta}  1/(2n) ||y - mu 1 - X beta||^2 + lambda ||beta||_1
//
// on a column-centred design. The intercept is unpenalized, so mu = mean(y)
// and the problem reduces to the centred response.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "explain/error.hpp"
#include "explain/linalg.hpp"

namespace explain {

template <typename Scalar>
Scalar soft_threshold(Scalar value, Scalar lambda) {
  if (value > lambda) return value - lambda;
  if (value < -lambda) return value + lambda;
  return Scalar(0);
}

struct LassoControl {
  double tolerance = 1e-9;  // max absolute coefficient change per sweep
  int max_sweeps = 10000;
};

template <typename Scalar>
struct LassoResult {
  Scalar intercept = 0;
  VectorX<Scalar> coefficients;
  int sweeps = 0;
  Scalar last_delta = 0;
  // Penalized objective before the first sweep and after every sweep.
  std::vector<Scalar> objective_trace;
};

template <typename Scalar>
struct Standardization {
  VectorX<Scalar> means;
  // Population standard deviations; zero for constant columns.
  VectorX<Scalar> scales;
};

// Columns rescaled to mean 0 and population variance 1. Constant columns
// become all-zero columns.
template <typename Derived>
Standardization<typename Derived::Scalar> standardize_columns(
    const Eigen::MatrixBase<Derived>& x, MatrixX<typename Derived::Scalar>& out) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.rows();
  Standardization<Scalar> s{VectorX<Scalar>(x.cols()), VectorX<Scalar>(x.cols())};
  out.resize(n, x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    s.means(j) = sequential_mean(x.col(j));
    const VectorX<Scalar> centred = x.col(j).array() - s.means(j);
    s.scales(j) = std::sqrt(centred.squaredNorm() / static_cast<Scalar>(n));
    out.col(j) = s.scales(j) > 0 ? VectorX<Scalar>(centred / s.scales(j))
                                 : VectorX<Scalar>::Zero(n);
  }
  return s;
}

// Smallest lambda at which every slope is zero: max_j |x_j^T (y - ybar)| / n.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar lasso_lambda_max(const Eigen::MatrixBase<DerivedX>& x,
                                           const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  const VectorX<Scalar> centred = y.array() - sequential_mean(y);
  const Scalar inv_n = Scalar(1) / static_cast<Scalar>(x.rows());
  Scalar best = 0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) best = std::max(best, std::abs(x.col(j).dot(centred) * inv_n));
  return best;
}

template <typename DerivedX, typename DerivedY>
LassoResult<typename DerivedX::Scalar> lasso_coordinate_descent(
    const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y,
    typename DerivedX::Scalar lambda, const LassoControl& control = {},
    const VectorX<typename DerivedX::Scalar>* warm_start = nullptr) {
  using Scalar = typename DerivedX::Scalar;
  if (lambda < 0) throw ModelError("lasso penalty must be nonnegative");
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  const Scalar inv_n = Scalar(1) / static_cast<Scalar>(n);

  LassoResult<Scalar> result;
  result.intercept = sequential_mean(y);
  result.coefficients = warm_start ? *warm_start : VectorX<Scalar>::Zero(p);

  VectorX<Scalar> curvature(p);
  for (Eigen::Index j = 0; j < p; ++j) curvature(j) = x.col(j).squaredNorm() * inv_n;

  VectorX<Scalar> residual = (y.array() - result.intercept).matrix() - x * result.coefficients;
  auto objective = [&](const VectorX<Scalar>& r, const VectorX<Scalar>& beta) {
    return Scalar(0.5) * inv_n * r.squaredNorm() + lambda * beta.template lpNorm<1>();
  };
  Scalar current = objective(residual, result.coefficients);
  result.objective_trace.push_back(current);
  VectorX<Scalar> trial_residual(n);
  VectorX<Scalar> trial_beta = result.coefficients;

  for (int sweep = 1; sweep <= control.max_sweeps; ++sweep) {
    Scalar delta = 0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const Scalar old = result.coefficients(j);
      Scalar updated = 0;
      if (curvature(j) > 0) {
        const Scalar rho = x.col(j).dot(residual) * inv_n + curvature(j) * old;
        updated = soft_threshold(rho, lambda) / curvature(j);
      }
      if (updated == old) continue;
      // Steps that round to a higher objective are rejected.
      trial_residual = residual - (updated - old) * x.col(j);
      trial_beta(j) = updated;
      const Scalar trial = objective(trial_residual, trial_beta);
      if (trial <= current) {
        residual.swap(trial_residual);
        result.coefficients(j) = updated;
        current = trial;
        delta = std::max(delta, std::abs(updated - old));
      } else {
        trial_beta(j) = old;
      }
    }
    result.sweeps = sweep;
    result.last_delta = delta;
    result.objective_trace.push_back(current);
    if (delta < control.tolerance) return result;
  }
  throw ModelError(fmt::format(
      "lasso coordinate descent did not converge in {} sweeps (last max change {:g})",
      control.max_sweeps, static_cast<double>(result.last_delta)));
}

}  // namespace explain
