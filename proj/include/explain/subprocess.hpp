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

// External scorer protocol.
//
//   stdin:  one header line of feature names joined by ',', then one CSV row
//           per observation (decimal point, numerics unquoted), each line
//           '\n'-terminated.
//   stdout: one decimal score per line, same order as the input rows.
//   exit:   0 on success.

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "explain/error.hpp"
#include "explain/tabular.hpp"

namespace explain {

class ScorerError : public Error {
 public:
  enum class Kind { kSpawnFailure, kNonzeroExit, kWrongLineCount, kUnparsableScore };

  ScorerError(Kind kind, const std::string& message, std::string stderr_text, int exit_status = 0)
      : Error(message), kind_(kind), stderr_(std::move(stderr_text)), exit_status_(exit_status) {}

  Kind kind() const { return kind_; }
  const std::string& stderr_text() const { return stderr_; }
  int exit_status() const { return exit_status_; }

 private:
  Kind kind_;
  std::string stderr_;
  int exit_status_;
};

struct ProcessResult {
  int exit_status = 0;  // 128 + signal number when killed by a signal
  std::string stdout_text;
  std::string stderr_text;
};

// Runs `command` (argv[0] resolved through PATH), feeding `input` to its
// standard input. Throws ScorerError(kSpawnFailure) if it cannot start.
ProcessResult run_process(const std::vector<std::string>& command, const std::string& input);

// Request body for a batch of rows.
std::string encode_scoring_request(const FeatureSchema& schema, const Eigen::MatrixXd& rows);

// Parses the scorer's standard output. Throws ScorerError for a wrong line
// count or an unparsable line.
Eigen::VectorXd decode_scoring_response(const std::string& stdout_text, Eigen::Index expected_rows,
                                        const std::string& stderr_text);

}  // namespace explain
