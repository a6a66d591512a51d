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

#include "explain/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "explain/breakdown.hpp"
#include "explain/error.hpp"
#include "explain/json_io.hpp"
#include "explain/live.hpp"
#include "explain/parallel.hpp"
#include "explain/render.hpp"
#include "explain/shapley.hpp"
#include "explain/subprocess.hpp"
#include "explain/tabular.hpp"

namespace explain {

namespace {

struct Output {
  Json result;
  std::string svg;
  std::string text;
};

std::size_t resolve_threads(const RunConfig& cfg) {
  if (cfg.threads) {
    if (*cfg.threads == 0) throw UsageError("--threads must be at least 1");
    return *cfg.threads;
  }
  if (const char* env = std::getenv("EXPLAIN_THREADS"); env && *env) {
    std::size_t n = 0;
    const char* end = env + std::char_traits<char>::length(env);
    auto [ptr, ec] = std::from_chars(env, end, n);
    if (ec != std::errc() || ptr != end || n == 0)
      throw UsageError(fmt::format("EXPLAIN_THREADS must be a positive integer, got '{}'", env));
    return n;
  }
  return default_thread_count();
}

Observation select_observation(const RunConfig& cfg, const Dataset& dataset) {
  if (cfg.row) {
    if (*cfg.row < 1 || *cfg.row > dataset.n_rows())
      throw UsageError(fmt::format("--row {} is out of range; rows are numbered 1..{}", *cfg.row, dataset.n_rows()));
    return dataset.observation(*cfg.row - 1);
  }
  const FeatureSchema schema = dataset.feature_schema();
  const auto cells = split_csv_record(*cfg.observation, ',');
  if (cells.size() != schema.size())
    throw UsageError(fmt::format("--observation has {} values, the data has {} features", cells.size(), schema.size()));
  Observation obs{Eigen::VectorXd(static_cast<Eigen::Index>(cells.size()))};
  for (std::size_t j = 0; j < cells.size(); ++j) {
    try {
      obs.values(static_cast<Eigen::Index>(j)) = schema.parse_cell(j, cells[j]);
    } catch (const DataError& e) {
      throw UsageError(fmt::format("--observation: {}", e.what()));
    }
  }
  return obs;
}

Predictor build_predictor(const RunConfig& cfg, const Dataset& dataset) {
  const std::size_t response = *dataset.response_index();
  if (cfg.model == "ols") return Predictor::linear(fit_ols(dataset, response));
  if (cfg.model == "kernel-ridge") return fit_kernel_ridge(dataset, response, cfg.gamma, cfg.ridge);
  return external_scorer(cfg.command, dataset.feature_schema());
}

Direction parse_direction(const std::string& s) { return s == "down" ? Direction::kDown : Direction::kUp; }

BaselineMode parse_baseline(const std::string& s) {
  return s == "intercept" ? BaselineMode::kIntercept : BaselineMode::kZero;
}

Json config_json(const RunConfig& cfg) {
  Json c = {{"subcommand", cfg.subcommand}, {"data", cfg.data}, {"response", cfg.response}, {"model", cfg.model}};
  if (cfg.row) c["row"] = *cfg.row;
  if (cfg.observation) c["observation"] = *cfg.observation;
  if (cfg.model == "kernel-ridge") {
    c["gamma"] = cfg.gamma;
    c["ridge"] = cfg.ridge;
  }
  if (cfg.model == "external") c["command"] = cfg.command;
  if (cfg.subcommand == "breakdown" || cfg.subcommand == "trace") {
    c["direction"] = cfg.direction;
    c["up_distance"] = cfg.up_distance;
  }
  if (cfg.subcommand != "live" && cfg.subcommand != "trace") c["baseline"] = cfg.baseline;
  if (cfg.subcommand == "shapley") {
    c["method"] = cfg.method;
    if (cfg.method == "sample") c["permutations"] = cfg.permutations;
  }
  if (cfg.subcommand == "live") {
    c["size"] = cfg.size;
    c["white_box"] = cfg.white_box;
    if (cfg.lambda) c["lambda"] = *cfg.lambda;
  }
  return c;
}

std::string surrogate_text(const SurrogateFit& fit) {
  if (fit.model.std_errors) return render_forest(fit).text_fallback;
  const auto names = fit.model.encoder.encoded_names();
  std::size_t width = std::string("(intercept)").size();
  for (const auto& n : names) width = std::max(width, n.size());
  std::string out = fmt::format("{:<{}} | {:.6g}\n", "(intercept)", width, fit.model.intercept);
  for (std::size_t k = 0; k < names.size(); ++k)
    out += fmt::format("{:<{}} | {:.6g}\n", names[k], width, fit.model.coefficients(static_cast<Eigen::Index>(k)));
  return out + fmt::format("lambda = {:.6g}, r2 = {:.6f}\n", fit.lambda, fit.r2);
}

Output execute(const RunConfig& cfg) {
  CsvOptions csv;
  csv.response_name = cfg.response;
  const Dataset dataset = load_csv(cfg.data, csv);
  const Observation x_new = select_observation(cfg, dataset);
  const Predictor predictor = build_predictor(cfg, dataset);
  RelaxOptions relax;
  relax.threads = resolve_threads(cfg);

  Output out;
  if (cfg.subcommand == "breakdown") {
    AgBreakOptions opts;
    opts.direction = parse_direction(cfg.direction);
    opts.baseline_mode = parse_baseline(cfg.baseline);
    opts.up_distance = cfg.up_distance == "to-fnew" ? UpDistance::kToPrediction : UpDistance::kToBaseline;
    const Attribution a = ag_break(predictor, dataset, x_new, opts, relax);
    out.result = to_json(a);
    out.text = format_attribution(a, EntryOrder::kImportance);
    if (cfg.svg_path) out.svg = render_waterfall(a).svg_text;
  } else if (cfg.subcommand == "shapley") {
    ShapleyOptions opts;
    opts.baseline_mode = parse_baseline(cfg.baseline);
    ShapleyEstimate est;
    if (cfg.method == "exact") {
      est = shapley_exact(predictor, dataset, x_new, opts, relax);
    } else {
      Rng rng = make_rng(cfg.seed);
      est = shapley_sampled(predictor, dataset, x_new, cfg.permutations, rng, opts, relax);
    }
    out.result = to_json(est);
    out.text = format_attribution(est.attribution, EntryOrder::kImportance);
    if (cfg.svg_path) out.svg = render_waterfall(est.attribution).svg_text;
  } else if (cfg.subcommand == "live") {
    LocalDataset local = sample_locally(dataset, x_new, cfg.response, cfg.size, cfg.seed);
    local = add_predictions(std::move(local), predictor);
    const SurrogateFit fit =
        fit_explanation(local, cfg.white_box == "lasso" ? WhiteBox::kLasso : WhiteBox::kOls, cfg.lambda);
    out.result = to_json(fit);
    out.text = surrogate_text(fit);
    if (cfg.svg_path) out.svg = render_forest(fit).svg_text;
  } else {
    const RelaxedModel model(predictor, dataset, x_new, relax);
    AgBreakOptions opts;
    opts.direction = parse_direction(cfg.direction);
    opts.up_distance = cfg.up_distance == "to-fnew" ? UpDistance::kToPrediction : UpDistance::kToBaseline;
    const Attribution a = ag_break(model, opts);
    const RelaxationTrace trace = relaxation_trace(model, selection_order(a), opts.direction);
    out.result = to_json(trace);
    const PlotDocument doc = render_trace(trace);
    out.text = doc.text_fallback;
    if (cfg.svg_path) out.svg = doc.svg_text;
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(fmt::format("cannot open '{}' for writing", path));
  f << content;
  f.flush();
  if (!f) throw Error(fmt::format("failed writing '{}'", path));
}

void validate(const RunConfig& cfg, const CLI::App& app, bool has_command) {
  if (cfg.row && cfg.observation) throw UsageError("--row and --observation are mutually exclusive");
  if (!cfg.row && !cfg.observation) throw UsageError("one of --row or --observation is required");
  if (cfg.model == "external" && !has_command)
    throw UsageError("--model external needs a scorer command after '--'");
  if (cfg.model != "external" && has_command)
    throw UsageError("a scorer command after '--' requires --model external");
  if (cfg.model != "kernel-ridge" && (app.count("--gamma") || app.count("--ridge")))
    throw UsageError("--gamma and --ridge only apply to --model kernel-ridge");
  if (!(cfg.gamma > 0) || !(cfg.ridge > 0)) throw UsageError("--gamma and --ridge must be positive");
  if (cfg.lambda && !(*cfg.lambda >= 0)) throw UsageError("--lambda must be nonnegative");
  if (cfg.lambda && cfg.white_box != "lasso") throw UsageError("--lambda requires --white-box lasso");
  if (cfg.method == "sample" && cfg.permutations < 2) throw UsageError("--permutations must be at least 2");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  // Everything after the first "--" is the external scorer command.
  auto dash = std::find(args.begin(), args.end(), "--");
  std::vector<std::string> own(args.begin(), dash);
  RunConfig cfg;
  if (dash != args.end()) cfg.command.assign(dash + 1, args.end());
  const bool has_command = dash != args.end();

  CLI::App app{"Explain single predictions of tabular regression models.", "explain"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.add_option("--data", cfg.data, "CSV file")->required();
  app.add_option("--response", cfg.response, "Response column name")->required();
  app.add_option("--row", cfg.row, "1-based row of --data to explain");
  app.add_option("--observation", cfg.observation, "Comma-separated feature values to explain");
  app.add_option("--model", cfg.model, "ols, kernel-ridge or external")
      ->check(CLI::IsMember({"ols", "kernel-ridge", "external"}));
  app.add_option("--gamma", cfg.gamma, "Kernel ridge RBF width");
  app.add_option("--ridge", cfg.ridge, "Kernel ridge penalty");
  app.add_option("--direction", cfg.direction, "up or down")->check(CLI::IsMember({"up", "down"}));
  app.add_option("--baseline", cfg.baseline, "zero or intercept")->check(CLI::IsMember({"zero", "intercept"}));
  app.add_option("--up-distance", cfg.up_distance, "to-baseline or to-fnew")
      ->check(CLI::IsMember({"to-baseline", "to-fnew"}));
  app.add_option("--size", cfg.size, "Simulated neighbourhood size");
  app.add_option("--white-box", cfg.white_box, "ols or lasso")->check(CLI::IsMember({"ols", "lasso"}));
  app.add_option("--lambda", cfg.lambda, "Lasso penalty (cross-validated when unset)");
  app.add_option("--method", cfg.method, "exact or sample")->check(CLI::IsMember({"exact", "sample"}));
  app.add_option("--permutations", cfg.permutations, "Sampled Shapley permutations");
  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_option("--threads", cfg.threads, "Worker threads (default EXPLAIN_THREADS or all cores)");
  app.add_option("--json", cfg.json_path, "Write the result as JSON");
  app.add_option("--svg", cfg.svg_path, "Write the figure as SVG");
  app.add_option("--text", cfg.text_path, "Write the text layout");
  for (const char* name : {"breakdown", "shapley", "live", "trace"}) {
    static const std::map<std::string, std::string> help = {
        {"breakdown", "Greedy ag-break attribution"},
        {"shapley", "Exact or sampled Shapley attribution"},
        {"live", "Local surrogate (LIVE) explanation"},
        {"trace", "Relaxation trace along the greedy path"}};
    app.add_subcommand(name, help.at(name))->fallthrough();
  }

  try {
    std::vector<std::string> reversed(own.rbegin(), own.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "explain: " << e.what() << "\n";
    return 1;
  }

  try {
    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (cfg.direction.empty()) cfg.direction = cfg.subcommand == "trace" ? "down" : "up";
    if (cfg.baseline.empty()) cfg.baseline = cfg.subcommand == "shapley" ? "intercept" : "zero";
    validate(cfg, app, has_command);

    const Output result = execute(cfg);
    Json doc = {{"config", config_json(cfg)}, {"seed", cfg.seed}, {"version", kVersion}, {"result", result.result}};
    if (cfg.json_path) export_json(doc, *cfg.json_path);
    if (cfg.svg_path) write_text_file(*cfg.svg_path, result.svg);
    if (cfg.text_path) write_text_file(*cfg.text_path, result.text);
    if (!cfg.json_path && !cfg.svg_path && !cfg.text_path) out << result.text;
    return 0;
  } catch (const UsageError& e) {
    err << "explain: " << e.what() << "\n";
    return 1;
  } catch (const ScorerError& e) {
    err << "explain: " << e.what() << "\n";
    if (!e.stderr_text().empty()) err << "scorer stderr:\n" << e.stderr_text();
    return 2;
  } catch (const std::exception& e) {
    err << "explain: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace explain
