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


// Shared helpers for the test binaries.

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "explain/predict.hpp"
#include "explain/random.hpp"
#include "explain/tabular.hpp"

namespace explain::testing {

inline Dataset load_wine() {
  CsvOptions options;
  options.response_name = "quality";
  return load_csv(std::string(EXPLAIN_DATA_DIR) + "/winequality-red.csv", options);
}

// Numeric dataset with feature columns x1..xp and, when y is non-empty, a
// response column "y" in last position.
inline Dataset numeric_dataset(const Eigen::MatrixXd& x, const Eigen::VectorXd& y = {}) {
  std::vector<Column> cols;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    Column c{"x" + std::to_string(j + 1), ColumnKind::kNumeric, {}, {}};
    for (Eigen::Index i = 0; i < x.rows(); ++i) c.values.push_back(x(i, j));
    cols.push_back(std::move(c));
  }
  std::optional<std::size_t> response;
  if (y.size() > 0) {
    Column c{"y", ColumnKind::kNumeric, {}, {}};
    c.values.assign(y.data(), y.data() + y.size());
    response = cols.size();
    cols.push_back(std::move(c));
  }
  return Dataset(std::move(cols), response);
}

// n x p uniforms on [lo, hi) from a seeded generator, identical on every
// platform.
inline Eigen::MatrixXd uniform_matrix(std::size_t n, std::size_t p, std::uint64_t seed, double lo = -1.0,
                                      double hi = 1.0) {
  Rng rng = make_rng(seed);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return m;
}

inline std::vector<std::size_t> iota(std::size_t p) {
  std::vector<std::size_t> v(p);
  for (std::size_t j = 0; j < p; ++j) v[j] = j;
  return v;
}

}  // namespace explain::testing
