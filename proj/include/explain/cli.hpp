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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace explain {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string subcommand;  // breakdown | shapley | live | trace
  std::string data;
  std::string response;
  std::optional<std::size_t> row;  // 1-based
  std::optional<std::string> observation;
  std::string model = "ols";  // ols | kernel-ridge | external
  double gamma = 0.1;
  double ridge = 0.1;
  std::vector<std::string> command;
  std::string direction;  // default depends on the subcommand
  std::string baseline;
  std::string up_distance = "to-baseline";
  std::size_t size = 1000;
  std::string white_box = "ols";
  std::optional<double> lambda;
  std::string method = "exact";
  std::size_t permutations = 1000;
  std::uint64_t seed = 42;
  std::optional<std::size_t> threads;
  std::optional<std::string> json_path;
  std::optional<std::string> svg_path;
  std::optional<std::string> text_path;
};

// Entry point behind the `explain` binary. args excludes the program name.
// Returns 0 on success, 1 on usage errors, 2 on data or model errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace explain
