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

// Canonical JSON: object keys sorted, doubles in shortest round-trip form,
// two-space indent, trailing newline. Feature indices are 1-based.

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "explain/breakdown.hpp"
#include "explain/live.hpp"
#include "explain/relax.hpp"
#include "explain/shapley.hpp"

namespace explain {

using Json = nlohmann::json;

Json to_json(const Attribution& attribution);
Json to_json(const ShapleyEstimate& estimate);
Json to_json(const SurrogateFit& fit);
Json to_json(const RelaxationTrace& trace);

std::string canonical_dump(const Json& value);

// Writes canonical_dump(value). Throws Error on IO failure.
void export_json(const Json& value, const std::filesystem::path& path);

}  // namespace explain
