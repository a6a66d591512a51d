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

#include "explain/render.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "explain/error.hpp"

namespace explain {

namespace {

constexpr double kLabelRight = 280.0;
constexpr double kPlotLeft = 300.0;
constexpr double kPlotRight = 760.0;
constexpr double kTop = 40.0;

std::string num(double v) {
  std::string s = fmt::format("{:.3f}", v);
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string escape_xml(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

AxisScale make_scale(double lo, double hi) {
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  } else {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  return AxisScale{lo, hi, kPlotLeft, kPlotRight};
}

double row_top(std::size_t row) { return kTop + kRowHeight * static_cast<double>(row); }
double row_centre(std::size_t row) { return row_top(row) + kRowHeight / 2.0; }

int plot_height(std::size_t rows) { return kRowHeight * static_cast<int>(rows) + kPlotMargin; }

std::string svg_open(int width, int height, std::string_view title) {
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      width, height, width, height);
  s += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", width, height);
  s += fmt::format("<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                   width / 2, escape_xml(title));
  return s;
}

std::string vertical_rule(double x, double y0, double y1, std::string_view stroke, std::string_view dash) {
  std::string s = fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"{3}\"", num(x),
                              num(y0), num(y1), stroke);
  if (!dash.empty()) s += fmt::format(" stroke-dasharray=\"{}\"", dash);
  return s + "/>\n";
}

std::string axis(const AxisScale& scale, double y) {
  std::string s = fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
                              num(scale.px_lo), num(y), num(scale.px_hi), num(y));
  for (int k = 0; k <= 4; ++k) {
    const double v = scale.lo + (scale.hi - scale.lo) * k / 4.0;
    const double x = scale(v);
    s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", num(x),
                     num(y), num(y + 4));
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", num(x), num(y + 16),
                     num(v));
  }
  return s;
}

std::string label(std::size_t row, std::string_view text) {
  return fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\" dominant-baseline=\"middle\">{}</text>\n",
                     num(kLabelRight), num(row_centre(row)), escape_xml(text));
}

// Pipe-separated table with every column padded to its widest cell.
std::string text_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    width.resize(std::max(width.size(), r.size()), 0);
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) line += " | ";
      line += c == 0 ? fmt::format("{:<{}}", r[c], width[c]) : fmt::format("{:>{}}", r[c], width[c]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(i);
  if (i + 1 >= v.size()) return v.back();
  return v[i] + frac * (v[i + 1] - v[i]);
}

}  // namespace

const char* to_string(PlotKind kind) {
  switch (kind) {
    case PlotKind::kWaterfall: return "waterfall";
    case PlotKind::kForest: return "forest";
    case PlotKind::kTrace: return "trace";
  }
  return "unknown";
}

WaterfallLayout waterfall_layout(const Attribution& attribution, const WaterfallOptions& options) {
  const auto entries =
      options.sort == EntryOrder::kImportance ? attribution.importance_order() : attribution.entries;
  WaterfallLayout layout;
  layout.final_prediction = attribution.final_prediction;
  layout.average = attribution.baseline;
  double cursor = attribution.baseline;
  double lo = cursor, hi = cursor;
  for (const auto& e : entries) {
    if (e.is_intercept()) layout.average += e.contribution;
    WaterfallBar bar;
    bar.label = e.is_intercept() ? std::string("intercept") : fmt::format("{} = {}", e.feature, to_display(e.value));
    bar.start = cursor;
    cursor += e.contribution;
    bar.end = cursor;
    bar.contribution = e.contribution;
    lo = std::min(lo, cursor);
    hi = std::max(hi, cursor);
    layout.bars.push_back(std::move(bar));
  }
  lo = std::min(lo, attribution.final_prediction);
  hi = std::max(hi, attribution.final_prediction);
  layout.scale = make_scale(lo, hi);
  return layout;
}

PlotDocument render_waterfall(const Attribution& attribution, const WaterfallOptions& options) {
  const WaterfallLayout layout = waterfall_layout(attribution, options);
  const AxisScale& x = layout.scale;
  const std::size_t rows = layout.bars.size() + 1;
  PlotDocument doc{PlotKind::kWaterfall, {}, {}, kPlotWidth, plot_height(rows)};

  std::string& s = doc.svg_text;
  s = svg_open(doc.width, doc.height, fmt::format("{} attribution", to_string(attribution.method)));
  const double bottom = row_top(rows);
  if (options.baseline_line) s += vertical_rule(x(layout.average), kTop, bottom, "black", "");
  for (std::size_t i = 0; i < layout.bars.size(); ++i) {
    const WaterfallBar& b = layout.bars[i];
    const double x0 = std::min(x(b.start), x(b.end));
    const double x1 = std::max(x(b.start), x(b.end));
    const char* fill = b.contribution > 0 ? "#2e7d32" : b.contribution < 0 ? "#c62828" : "#9e9e9e";
    s += label(i, b.label);
    s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n", num(x0),
                     num(row_top(i) + 8), num(x1 - x0), num(kRowHeight - 16.0), fill);
    s += fmt::format("<text x=\"{}\" y=\"{}\" dominant-baseline=\"middle\">{}</text>\n", num(x1 + 4),
                     num(row_centre(i)), num(b.contribution));
    if (i + 1 < layout.bars.size())
      s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#616161\"/>\n",
                       num(x(b.end)), num(row_top(i) + kRowHeight - 8), num(row_top(i + 1) + 8));
  }
  const std::size_t last = layout.bars.size();
  s += label(last, "final_prognosis");
  s += vertical_rule(x(layout.final_prediction), row_top(last) + 6, row_top(last) + kRowHeight - 6, "#1565c0", "");
  s += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"#1565c0\"/>\n", num(x(layout.final_prediction)),
                   num(row_centre(last)));
  s += fmt::format("<text x=\"{}\" y=\"{}\" dominant-baseline=\"middle\">{}</text>\n",
                   num(x(layout.final_prediction) + 8), num(row_centre(last)), num(layout.final_prediction));
  s += axis(x, bottom + 8);
  s += "</svg>\n";

  std::vector<std::vector<std::string>> table{{"", "start", "end", "contribution"}};
  table.push_back({"baseline", "", "", num(attribution.baseline)});
  for (const auto& b : layout.bars) table.push_back({b.label, num(b.start), num(b.end), num(b.contribution)});
  table.push_back({"final_prognosis", "", "", num(layout.final_prediction)});
  doc.text_fallback = text_table(table);
  return doc;
}

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) throw UsageError("quantile probability must be in (0, 1)");
  // Rational approximation, then one Halley step against erfc.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double low = 0.02425;
  double x;
  if (prob < low) {
    const double q = std::sqrt(-2 * std::log(prob));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (prob <= 1 - low) {
    const double q = prob - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log(1 - prob));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - prob;
  const double u = e * std::sqrt(2 * std::numbers::pi) * std::exp(x * x / 2);
  return x - u / (1 + x * u / 2);
}

std::vector<ForestInterval> forest_intervals(const SurrogateFit& fit, double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw UsageError("confidence must be in (0, 1)");
  if (!fit.model.std_errors)
    throw ModelError(
        "surrogate has no standard errors (lasso fit); refit with the ols white box on the selected "
        "features to draw a forest plot");
  const double z = normal_quantile(0.5 + confidence / 2);
  const auto names = fit.model.encoder.encoded_names();
  std::vector<ForestInterval> out;
  for (Eigen::Index k = 0; k < fit.model.coefficients.size(); ++k) {
    const double est = fit.model.coefficients(k);
    const double half = z * (*fit.model.std_errors)(k);
    out.push_back({names[static_cast<std::size_t>(k)], est, est - half, est + half});
  }
  return out;
}

PlotDocument render_forest(const SurrogateFit& fit, double confidence) {
  const auto intervals = forest_intervals(fit, confidence);
  const std::size_t rows = std::max<std::size_t>(intervals.size(), 1);
  PlotDocument doc{PlotKind::kForest, {}, {}, kPlotWidth, plot_height(rows)};

  double lo = 0.0, hi = 0.0;
  for (const auto& iv : intervals) {
    lo = std::min(lo, iv.lower);
    hi = std::max(hi, iv.upper);
  }
  const AxisScale x = make_scale(lo, hi);
  std::string& s = doc.svg_text;
  s = svg_open(doc.width, doc.height,
               fmt::format("surrogate coefficients, {}% intervals", num(100.0 * confidence)));
  const double bottom = row_top(rows);
  s += vertical_rule(x(0.0), kTop, bottom, "#616161", "4 4");
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto& iv = intervals[i];
    const double y = row_centre(i);
    s += label(i, iv.name);
    s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" stroke-width=\"2\"/>\n",
                     num(x(iv.lower)), num(y), num(x(iv.upper)), num(y));
    s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"8\" height=\"8\" fill=\"black\"/>\n", num(x(iv.estimate) - 4),
                     num(y - 4));
  }
  s += axis(x, bottom + 8);
  s += "</svg>\n";

  std::vector<std::vector<std::string>> table{{"", "estimate", "lower", "upper"}};
  for (const auto& iv : intervals) table.push_back({iv.name, num(iv.estimate), num(iv.lower), num(iv.upper)});
  doc.text_fallback = text_table(table);
  return doc;
}

double silverman_bandwidth(const Eigen::VectorXd& sample) {
  const auto n = static_cast<std::size_t>(sample.size());
  if (n < 2) return 0.0;
  std::vector<double> v(sample.data(), sample.data() + n);
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  std::sort(v.begin(), v.end());
  const double iqr = quantile_sorted(v, 0.75) - quantile_sorted(v, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0)) spread = sd;
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

PlotDocument render_trace(const RelaxationTrace& trace) {
  if (trace.steps.empty()) throw UsageError("cannot render an empty relaxation trace");
  const std::size_t rows = trace.steps.size();
  PlotDocument doc{PlotKind::kTrace, {}, {}, kPlotWidth, plot_height(rows)};

  double lo = trace.steps[0].mean, hi = lo;
  for (const auto& st : trace.steps) {
    if (st.scores.size() > 0) {
      lo = std::min(lo, st.scores.minCoeff());
      hi = std::max(hi, st.scores.maxCoeff());
    }
  }
  const AxisScale x = make_scale(lo, hi);

  auto step_label = [&](const TraceStep& st) -> std::string {
    if (!st.relaxed_feature)
      return trace.direction == Direction::kDown ? "all features fixed" : "no features fixed";
    const std::string& name = trace.feature_names.at(*st.relaxed_feature);
    return fmt::format("{} {}", trace.direction == Direction::kDown ? "-" : "+", name);
  };

  std::string& s = doc.svg_text;
  s = svg_open(doc.width, doc.height, fmt::format("relaxation trace ({})", to_string(trace.direction)));

  // Gray per-observation paths under the silhouettes.
  std::size_t n_obs = trace.steps[0].scores.size();
  for (const auto& st : trace.steps) n_obs = std::min<std::size_t>(n_obs, st.scores.size());
  if (rows > 1) {
    s += "<g stroke=\"#bdbdbd\" stroke-width=\"0.5\" fill=\"none\">\n";
    for (std::size_t i = 0; i < n_obs; ++i) {
      s += "<polyline points=\"";
      for (std::size_t k = 0; k < rows; ++k) {
        if (k) s += ' ';
        s += num(x(trace.steps[k].scores(static_cast<Eigen::Index>(i)))) + "," + num(row_centre(k));
      }
      s += "\"/>\n";
    }
    s += "</g>\n";
  }

  constexpr int kGrid = 64;
  constexpr double kHalfHeight = 14.0;
  std::vector<std::vector<std::string>> table{{"", "mean", "min", "max", "bandwidth"}};
  for (std::size_t k = 0; k < rows; ++k) {
    const TraceStep& st = trace.steps[k];
    const double y = row_centre(k);
    s += label(k, step_label(st));
    const double h = silverman_bandwidth(st.scores);
    const double smin = st.scores.size() ? st.scores.minCoeff() : st.mean;
    const double smax = st.scores.size() ? st.scores.maxCoeff() : st.mean;
    if (!(h > 0)) {
      s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#5e35b1\" stroke-width=\"2\"/>\n",
                       num(x(smin)), num(y - kHalfHeight), num(y + kHalfHeight));
    } else {
      const double g0 = std::max(smin - 3 * h, x.lo);
      const double g1 = std::min(smax + 3 * h, x.hi);
      std::vector<double> grid(kGrid), dens(kGrid);
      double peak = 0.0;
      for (int g = 0; g < kGrid; ++g) {
        grid[g] = g0 + (g1 - g0) * g / (kGrid - 1.0);
        double acc = 0.0;
        for (Eigen::Index i = 0; i < st.scores.size(); ++i) {
          const double u = (grid[g] - st.scores(i)) / h;
          acc += std::exp(-0.5 * u * u);
        }
        dens[g] = acc;
        peak = std::max(peak, acc);
      }
      std::string pts;
      for (int g = 0; g < kGrid; ++g)
        pts += fmt::format("{}{},{}", g ? " " : "", num(x(grid[g])), num(y - kHalfHeight * dens[g] / peak));
      for (int g = kGrid - 1; g >= 0; --g)
        pts += fmt::format(" {},{}", num(x(grid[g])), num(y + kHalfHeight * dens[g] / peak));
      s += fmt::format("<polygon points=\"{}\" fill=\"#b39ddb\" fill-opacity=\"0.7\" stroke=\"#5e35b1\"/>\n", pts);
    }
    s += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"#d32f2f\"/>\n", num(x(st.mean)), num(y));
    table.push_back({step_label(st), num(st.mean), num(smin), num(smax), num(h)});
  }
  s += axis(x, row_top(rows) + 8);
  s += "</svg>\n";
  doc.text_fallback = text_table(table);
  return doc;
}

}  // namespace explain
