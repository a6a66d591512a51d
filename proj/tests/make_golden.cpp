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


// Regenerates the golden SVG files. Run only after an intended rendering
// change, then review the diff.

#include <fstream>
#include <iostream>

#include "golden_cases.hpp"

int main() {
  using namespace explain::testing;
  const std::pair<const char*, explain::PlotDocument> docs[] = {
      {"waterfall.svg", golden_waterfall()}, {"forest.svg", golden_forest()}, {"trace.svg", golden_trace()}};
  for (const auto& [name, doc] : docs) {
    std::ofstream out(golden_path(name), std::ios::binary | std::ios::trunc);
    out << doc.svg_text;
    std::cout << "wrote " << golden_path(name) << "\n";
  }
  return 0;
}
