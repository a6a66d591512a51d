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

// Dense least squares and sequential-sum helpers, templated on the scalar.

#pragma once

#include <cstddef>
#include <optional>

#include <Eigen/Dense>

namespace explain {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Left-to-right sum. Eigen's redux may reorder; results here must not
// depend on vectorization width.
template <typename Derived>
typename Derived::Scalar sequential_sum(const Eigen::MatrixBase<Derived>& v) {
  typename Derived::Scalar s(0);
  for (Eigen::Index i = 0; i < v.size(); ++i) s += v(i);
  return s;
}

template <typename Derived>
typename Derived::Scalar sequential_mean(const Eigen::MatrixBase<Derived>& v) {
  return sequential_sum(v) / static_cast<typename Derived::Scalar>(v.size());
}

template <typename Scalar>
struct LeastSquaresFit {
  VectorX<Scalar> coefficients;
  VectorX<Scalar> residuals;
  // (X^T X)^{-1}; multiply by residual_variance for the covariance.
  MatrixX<Scalar> unscaled_covariance;
  // RSS / (n - k). Zero when n == k.
  Scalar residual_variance = 0;
};

// Index of the first column that lies in the span of the columns before it,
// or nullopt when the design has full column rank.
template <typename Derived>
std::optional<Eigen::Index> first_dependent_column(const Eigen::MatrixBase<Derived>& design) {
  using Scalar = typename Derived::Scalar;
  Eigen::ColPivHouseholderQR<MatrixX<Scalar>> full(design);
  if (full.rank() == design.cols()) return std::nullopt;
  for (Eigen::Index k = 1; k <= design.cols(); ++k) {
    Eigen::ColPivHouseholderQR<MatrixX<Scalar>> qr(design.leftCols(k));
    if (qr.rank() < k) return k - 1;
  }
  return design.cols() - 1;
}

// Householder QR least squares. The caller checks rank first.
template <typename DerivedX, typename DerivedY>
LeastSquaresFit<typename DerivedX::Scalar> least_squares(
    const Eigen::MatrixBase<DerivedX>& design, const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  const Eigen::Index n = design.rows();
  const Eigen::Index k = design.cols();
  Eigen::HouseholderQR<MatrixX<Scalar>> qr(design);
  LeastSquaresFit<Scalar> fit;
  fit.coefficients = qr.solve(y);
  fit.residuals = y - design * fit.coefficients;
  const MatrixX<Scalar> r = qr.matrixQR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
  const MatrixX<Scalar> r_inv =
      r.template triangularView<Eigen::Upper>().solve(MatrixX<Scalar>::Identity(k, k));
  fit.unscaled_covariance = r_inv * r_inv.transpose();
  const Scalar rss = fit.residuals.squaredNorm();
  fit.residual_variance = n > k ? rss / static_cast<Scalar>(n - k) : Scalar(0);
  return fit;
}

}  // namespace explain
