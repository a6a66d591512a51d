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

#pragma once

#include <stdexcept>
#include <string>

namespace explain {

// Base of every error the toolkit raises. The CLI maps UsageError to exit
// code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed command line or out-of-range selector.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Ingestion and schema problems: IO failure, ragged rows, unknown columns.
class DataError : public Error {
 public:
  using Error::Error;
};

// Fitting and scoring failures: rank deficiency, singular systems, caps.
class ModelError : public Error {
 public:
  using Error::Error;
};

// Rank-deficient design matrix. `column` names the first encoded column that
// is linearly dependent on the ones before it.
class RankDeficiencyError : public ModelError {
 public:
  RankDeficiencyError(const std::string& message, std::string column)
      : ModelError(message), column_(std::move(column)) {}
  const std::string& column() const { return column_; }

 private:
  std::string column_;
};

}  // namespace explain
