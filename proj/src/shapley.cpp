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

#include "explain/shapley.hpp"

#include <cmath>
#include <map>
#include <vector>

#include <fmt/format.h>

#include "explain/error.hpp"
#include "explain/parallel.hpp"

namespace explain {

namespace {

double log_factorial(std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 2; k <= n; ++k) s += std::log(static_cast<double>(k));
  return s;
}

Attribution make_attribution(const RelaxedModel& model, AttributionMethod method, BaselineMode mode,
                             double phi0, const Eigen::VectorXd& phi) {
  const FeatureSchema& schema = model.predictor().schema();
  Attribution a;
  a.method = method;
  a.baseline_mode = mode;
  a.final_prediction = model.prediction();
  if (mode == BaselineMode::kIntercept) {
    a.baseline = phi0;
  } else {
    a.baseline = 0.0;
    a.entries.push_back({"intercept", std::nullopt, std::monostate{}, phi0});
  }
  for (std::size_t j = 0; j < schema.size(); ++j)
    a.entries.push_back({schema.names[j], j,
                         cell_value(schema, j, model.x_new().values[static_cast<Eigen::Index>(j)]),
                         phi(static_cast<Eigen::Index>(j))});
  return a;
}

}  // namespace

Eigen::VectorXd ShapleyEstimate::values() const {
  std::size_t p = 0;
  for (const auto& e : attribution.entries)
    if (e.feature_index) p = std::max(p, *e.feature_index + 1);
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  for (const auto& e : attribution.entries)
    if (e.feature_index) phi(static_cast<Eigen::Index>(*e.feature_index)) = e.contribution;
  return phi;
}

double shapley_weight(std::size_t subset_size, std::size_t p) {
  if (subset_size >= p) throw UsageError("subset must exclude the attributed feature");
  return std::exp(log_factorial(subset_size) + log_factorial(p - subset_size - 1) - log_factorial(p));
}

ShapleyEstimate shapley_exact(const RelaxedModel& model, const ShapleyOptions& options) {
  const std::size_t p = model.n_features();
  if (p > options.max_features || p >= 63)
    throw ModelError(fmt::format(
        "exact Shapley values need 2^p relaxed predictions; p = {} exceeds the cap of {}", p,
        options.max_features));
  const std::uint64_t n_subsets = std::uint64_t{1} << p;
  const auto value = parallel_map<double>(n_subsets, model.options().threads, [&](std::size_t mask) {
    return model.relaxed_prediction(IndexSet::from_mask(mask, p));
  });

  std::vector<double> weights(p);
  for (std::size_t s = 0; s < p; ++s) weights[s] = shapley_weight(s, p);

  Eigen::VectorXd phi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  for (std::size_t j = 0; j < p; ++j) {
    const std::uint64_t bit = std::uint64_t{1} << j;
    double acc = 0.0;
    for (std::uint64_t mask = 0; mask < n_subsets; ++mask) {
      if (mask & bit) continue;
      const auto size = static_cast<std::size_t>(__builtin_popcountll(mask));
      acc += weights[size] * (value[mask | bit] - value[mask]);
    }
    phi(static_cast<Eigen::Index>(j)) = acc;
  }

  ShapleyEstimate est;
  est.attribution = make_attribution(model, AttributionMethod::kShapleyExact, options.baseline_mode,
                                     value[0], phi);
  return est;
}

ShapleyEstimate shapley_exact(const Predictor& predictor, const Dataset& dataset, const Observation& x_new,
                              const ShapleyOptions& options, const RelaxOptions& relax) {
  if (dataset.n_features() > options.max_features)
    throw ModelError(fmt::format(
        "exact Shapley values need 2^p relaxed predictions; p = {} exceeds the cap of {}",
        dataset.n_features(), options.max_features));
  return shapley_exact(RelaxedModel(predictor, dataset, x_new, relax), options);
}

ShapleyEstimate shapley_sampled(const RelaxedModel& model, std::size_t n_permutations, Rng& rng,
                                const ShapleyOptions& options) {
  if (n_permutations < 2) throw UsageError("sampled Shapley values need at least 2 permutations");
  const std::size_t p = model.n_features();

  std::vector<std::vector<std::size_t>> perms(n_permutations);
  for (auto& perm : perms) perm = random_permutation(p, rng);

  // Every prefix set the walks visit, evaluated once in a fixed order.
  using Key = std::vector<bool>;
  std::map<Key, std::size_t> index;
  std::vector<Key> keys;
  auto intern = [&](const Key& k) {
    auto [it, inserted] = index.emplace(k, keys.size());
    if (inserted) keys.push_back(k);
    return it->second;
  };
  std::vector<std::vector<std::size_t>> walk(n_permutations);
  for (std::size_t r = 0; r < n_permutations; ++r) {
    Key k(p, false);
    walk[r].push_back(intern(k));
    for (std::size_t j : perms[r]) {
      k[j] = true;
      walk[r].push_back(intern(k));
    }
  }
  const auto value = parallel_map<double>(keys.size(), model.options().threads, [&](std::size_t i) {
    std::vector<std::size_t> members;
    for (std::size_t j = 0; j < p; ++j)
      if (keys[i][j]) members.push_back(j);
    return model.relaxed_prediction(IndexSet(std::move(members)));
  });

  // Welford running mean and sum of squared deviations per feature.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  for (std::size_t r = 0; r < n_permutations; ++r) {
    const double count = static_cast<double>(r + 1);
    for (std::size_t step = 0; step < p; ++step) {
      const auto j = static_cast<Eigen::Index>(perms[r][step]);
      const double marginal = value[walk[r][step + 1]] - value[walk[r][step]];
      const double delta = marginal - mean(j);
      mean(j) += delta / count;
      m2(j) += delta * (marginal - mean(j));
    }
  }
  const double n = static_cast<double>(n_permutations);
  Eigen::VectorXd se = (m2 / (n - 1.0)).cwiseMax(0.0).cwiseSqrt() / std::sqrt(n);

  const double phi0 = value[index.at(Key(p, false))];
  Eigen::VectorXd adjusted = mean;
  const double residual = model.prediction() - phi0 - mean.sum();
  const double total_abs = mean.cwiseAbs().sum();
  if (residual != 0.0 && p > 0) {
    if (total_abs > 0)
      adjusted += residual * mean.cwiseAbs() / total_abs;
    else
      adjusted.array() += residual / static_cast<double>(p);
  }

  ShapleyEstimate est;
  est.attribution = make_attribution(model, AttributionMethod::kShapleySampled, options.baseline_mode,
                                     phi0, adjusted);
  est.std_errors = se;
  est.unadjusted = mean;
  est.n_permutations = n_permutations;
  return est;
}

ShapleyEstimate shapley_sampled(const Predictor& predictor, const Dataset& dataset, const Observation& x_new,
                                std::size_t n_permutations, Rng& rng, const ShapleyOptions& options,
                                const RelaxOptions& relax) {
  return shapley_sampled(RelaxedModel(predictor, dataset, x_new, relax), n_permutations, rng, options);
}

}  // namespace explain
