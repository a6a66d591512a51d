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

// SVG and plain-text figures. Output is a pure function of the input: all
// numbers are written with a fixed three-decimal format and no locale.

#pragma once

#include <string>
#include <vector>

#include "explain/breakdown.hpp"
#include "explain/live.hpp"
#include "explain/relax.hpp"

namespace explain {

enum class PlotKind { kWaterfall, kForest, kTrace };

const char* to_string(PlotKind kind);

struct PlotDocument {
  PlotKind kind = PlotKind::kWaterfall;
  std::string svg_text;
  std::string text_fallback;
  int width = 0;
  int height = 0;
};

// Every plot is 800 px wide and 40 px per row plus 80 px of margins tall.
inline constexpr int kPlotWidth = 800;
inline constexpr int kRowHeight = 40;
inline constexpr int kPlotMargin = 80;

// Maps data values onto the horizontal pixel range of the plot area.
struct AxisScale {
  double lo = 0.0;
  double hi = 1.0;
  double px_lo = 0.0;
  double px_hi = 1.0;

  double operator()(double v) const { return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo); }
};

struct WaterfallOptions {
  EntryOrder sort = EntryOrder::kImportance;
  bool baseline_line = true;
};

struct WaterfallBar {
  std::string label;  // "feature = value" or "intercept"
  double start = 0.0;
  double end = 0.0;
  double contribution = 0.0;
};

struct WaterfallLayout {
  AxisScale scale;
  std::vector<WaterfallBar> bars;
  double average = 0.0;  // fully relaxed prediction
  double final_prediction = 0.0;
};

// Bar i spans [baseline + c_1 + ... + c_{i-1}, baseline + c_1 + ... + c_i].
WaterfallLayout waterfall_layout(const Attribution& attribution, const WaterfallOptions& options = {});
PlotDocument render_waterfall(const Attribution& attribution, const WaterfallOptions& options = {});

struct ForestInterval {
  std::string name;
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// Standard normal quantile.
double normal_quantile(double prob);

// estimate +/- z * std_error for each slope, z the two-sided normal quantile
// of `confidence`. Throws ModelError when the fit has no standard errors.
std::vector<ForestInterval> forest_intervals(const SurrogateFit& fit, double confidence);
PlotDocument render_forest(const SurrogateFit& fit, double confidence = 0.95);

// Gaussian kernel density bandwidth 0.9 * min(sd, IQR / 1.34) * n^(-1/5),
// falling back to sd when the IQR is 0. Zero for constant samples.
double silverman_bandwidth(const Eigen::VectorXd& sample);
PlotDocument render_trace(const RelaxationTrace& trace);

}  // namespace explain
