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

#include "explain/relax.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "explain/error.hpp"
#include "explain/linalg.hpp"
#include "explain/random.hpp"

namespace explain {

namespace {

void check_schema(const Predictor& predictor, const Dataset& dataset, const Observation& x_new) {
  const FeatureSchema ds = dataset.feature_schema();
  const FeatureSchema& ps = predictor.schema();
  if (ds.names != ps.names || ds.kinds != ps.kinds)
    throw DataError("predictor feature schema does not match the dataset's feature columns");
  if (x_new.size() != ds.size())
    throw DataError(fmt::format("observation has {} values, dataset has {} features", x_new.size(),
                                ds.size()));
}

// Mean of the scores; exact when every score is identical, so fully pinned
// rows reproduce f(x_new) bit for bit.
double score_mean(const Eigen::VectorXd& scores) {
  if (scores.size() > 0 && scores.minCoeff() == scores.maxCoeff()) return scores(0);
  return sequential_mean(scores);
}

}  // namespace

IndexSet::IndexSet(std::initializer_list<std::size_t> members)
    : IndexSet(std::vector<std::size_t>(members)) {}

IndexSet::IndexSet(std::vector<std::size_t> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
    throw UsageError("index set has duplicate members");
}

IndexSet IndexSet::all(std::size_t p) {
  IndexSet s;
  for (std::size_t j = 0; j < p; ++j) s.members_.push_back(j);
  return s;
}

IndexSet IndexSet::from_mask(std::uint64_t mask, std::size_t p) {
  IndexSet s;
  for (std::size_t j = 0; j < p; ++j)
    if (mask >> j & 1u) s.members_.push_back(j);
  return s;
}

bool IndexSet::contains(std::size_t j) const {
  return std::binary_search(members_.begin(), members_.end(), j);
}

IndexSet IndexSet::with(std::size_t j) const {
  if (contains(j)) throw UsageError(fmt::format("feature {} is already in the set", j));
  IndexSet s = *this;
  s.members_.insert(std::upper_bound(s.members_.begin(), s.members_.end(), j), j);
  return s;
}

IndexSet IndexSet::without(std::size_t j) const {
  IndexSet s = *this;
  auto it = std::lower_bound(s.members_.begin(), s.members_.end(), j);
  if (it == s.members_.end() || *it != j) throw UsageError(fmt::format("feature {} is not in the set", j));
  s.members_.erase(it);
  return s;
}

RelaxedModel::RelaxedModel(const Predictor& predictor, const Dataset& dataset, Observation x_new,
                           const RelaxOptions& options)
    : predictor_(predictor), x_new_(std::move(x_new)), options_(options) {
  check_schema(predictor, dataset, x_new_);
  background_ = dataset.feature_matrix();
  if (options_.subsample_rows && *options_.subsample_rows < dataset.n_rows()) {
    if (*options_.subsample_rows == 0) throw UsageError("row subsample must be positive");
    Rng rng = make_rng(options_.subsample_seed);
    auto perm = random_permutation(dataset.n_rows(), rng);
    perm.resize(*options_.subsample_rows);
    std::sort(perm.begin(), perm.end());
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(perm.size()), background_.cols());
    for (std::size_t i = 0; i < perm.size(); ++i)
      sub.row(static_cast<Eigen::Index>(i)) = background_.row(static_cast<Eigen::Index>(perm[i]));
    background_ = std::move(sub);
  }
  prediction_ = predictor_.score(x_new_);
}

Eigen::VectorXd RelaxedModel::scores(const IndexSet& fixed) const {
  Eigen::MatrixXd hybrid = background_;
  for (std::size_t j : fixed.members()) {
    if (j >= n_features()) throw DataError(fmt::format("feature index {} out of range", j));
    hybrid.col(static_cast<Eigen::Index>(j)).setConstant(x_new_.values[static_cast<Eigen::Index>(j)]);
  }
  return predictor_.score(hybrid);
}

double RelaxedModel::relaxed_prediction(const IndexSet& fixed) const { return score_mean(scores(fixed)); }

double relaxed_prediction(const Predictor& predictor, const Dataset& dataset, const Observation& x_new,
                          const IndexSet& fixed, const RelaxOptions& options) {
  return RelaxedModel(predictor, dataset, x_new, options).relaxed_prediction(fixed);
}

double relaxed_distance(const Predictor& predictor, const Dataset& dataset, const Observation& x_new,
                        const IndexSet& fixed, const RelaxOptions& options) {
  RelaxedModel model(predictor, dataset, x_new, options);
  return std::abs(model.relaxed_prediction(fixed) - model.prediction());
}

double added_contribution(const Predictor& predictor, const Dataset& dataset, const Observation& x_new,
                          const IndexSet& fixed, std::size_t j, const RelaxOptions& options) {
  if (fixed.contains(j)) throw UsageError(fmt::format("feature {} is already fixed", j));
  RelaxedModel model(predictor, dataset, x_new, options);
  return model.relaxed_prediction(fixed.with(j)) - model.relaxed_prediction(fixed);
}

const char* to_string(Direction d) { return d == Direction::kUp ? "up" : "down"; }

RelaxationTrace relaxation_trace(const RelaxedModel& model, const std::vector<std::size_t>& order,
                                 Direction direction) {
  const std::size_t p = model.n_features();
  {
    std::vector<std::size_t> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    bool ok = sorted.size() == p;
    for (std::size_t i = 0; ok && i < p; ++i) ok = sorted[i] == i;
    if (!ok) throw UsageError("trace order is not a permutation of the feature indices");
  }
  RelaxationTrace trace;
  trace.direction = direction;
  trace.feature_names = model.predictor().schema().names;
  IndexSet fixed = direction == Direction::kDown ? IndexSet::all(p) : IndexSet{};
  auto push = [&](std::optional<std::size_t> feature) {
    TraceStep step;
    step.fixed = fixed;
    step.relaxed_feature = feature;
    step.scores = model.scores(fixed);
    step.mean = score_mean(step.scores);
    trace.steps.push_back(std::move(step));
  };
  push(std::nullopt);
  for (std::size_t j : order) {
    fixed = direction == Direction::kDown ? fixed.without(j) : fixed.with(j);
    push(j);
  }
  return trace;
}

RelaxationTrace relaxation_trace(const Predictor& predictor, const Dataset& dataset,
                                 const Observation& x_new, const std::vector<std::size_t>& order,
                                 Direction direction, const RelaxOptions& options) {
  return relaxation_trace(RelaxedModel(predictor, dataset, x_new, options), order, direction);
}

}  // namespace explain
