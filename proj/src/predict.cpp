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

#include "explain/predict.hpp"

#include <cmath>
#include <set>

#include <fmt/format.h>

#include "explain/error.hpp"
#include "explain/linalg.hpp"
#include "explain/subprocess.hpp"

namespace explain {

FeatureEncoder FeatureEncoder::identity(const FeatureSchema& schema) {
  if (schema.has_categorical())
    throw DataError("identity encoding requires numeric features only");
  FeatureEncoder enc;
  enc.schema_ = schema;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    enc.slots_.push_back({j, std::nullopt});
    enc.names_.push_back(schema.names[j]);
  }
  return enc;
}

FeatureEncoder FeatureEncoder::fit(const FeatureSchema& schema, const Eigen::MatrixXd& rows,
                                   const Observation* reference) {
  if (static_cast<std::size_t>(rows.cols()) != schema.size())
    throw DataError("encoder rows do not match the feature schema");
  if (reference && reference->size() != schema.size())
    throw DataError("reference observation does not match the feature schema");
  FeatureEncoder enc;
  enc.schema_ = schema;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (schema.kinds[j] == ColumnKind::kNumeric) {
      enc.slots_.push_back({j, std::nullopt});
      enc.names_.push_back(schema.names[j]);
      continue;
    }
    const double ref = reference ? reference->values[static_cast<Eigen::Index>(j)] : 0.0;
    std::set<double> present;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) present.insert(rows(i, static_cast<Eigen::Index>(j)));
    for (double level : present) {
      if (level == ref) continue;
      enc.slots_.push_back({j, level});
      enc.names_.push_back(schema.names[j] + "=" + schema.format_cell(j, level));
    }
  }
  return enc;
}

Eigen::MatrixXd FeatureEncoder::encode(const Eigen::MatrixXd& rows) const {
  if (static_cast<std::size_t>(rows.cols()) != schema_.size())
    throw DataError(fmt::format("rows have {} columns, schema has {} features", rows.cols(),
                                schema_.size()));
  Eigen::MatrixXd out(rows.rows(), static_cast<Eigen::Index>(slots_.size()));
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    const auto src = rows.col(static_cast<Eigen::Index>(slots_[k].feature));
    if (slots_[k].level)
      out.col(static_cast<Eigen::Index>(k)) = (src.array() == *slots_[k].level).cast<double>();
    else
      out.col(static_cast<Eigen::Index>(k)) = src;
  }
  return out;
}

Eigen::VectorXd FeatureEncoder::encode(const Observation& obs) const {
  return encode(Eigen::MatrixXd(obs.values.transpose())).row(0).transpose();
}

LinearModel LinearModel::from_parameters(const FeatureSchema& schema, double intercept,
                                         Eigen::VectorXd coefficients, Eigen::VectorXd means) {
  if (static_cast<std::size_t>(coefficients.size()) != schema.size() ||
      means.size() != coefficients.size())
    throw ModelError("coefficient, mean and schema sizes differ");
  LinearModel m;
  m.encoder = FeatureEncoder::identity(schema);
  m.intercept = intercept;
  m.coefficients = std::move(coefficients);
  m.means = std::move(means);
  return m;
}

Eigen::VectorXd LinearModel::score(const Eigen::MatrixXd& rows) const {
  const Eigen::MatrixXd design = encoder.encode(rows);
  Eigen::VectorXd out(design.rows());
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    double s = intercept;
    for (Eigen::Index k = 0; k < design.cols(); ++k) s += coefficients(k) * design(i, k);
    out(i) = s;
  }
  return out;
}

double LinearModel::score(const Observation& obs) const {
  return score(Eigen::MatrixXd(obs.values.transpose()))(0);
}

LinearModel fit_ols(const FeatureEncoder& encoder, const Eigen::MatrixXd& rows,
                    const Eigen::VectorXd& y) {
  const Eigen::MatrixXd encoded = encoder.encode(rows);
  const Eigen::Index n = encoded.rows();
  const Eigen::Index k = encoded.cols() + 1;
  if (y.size() != n) throw ModelError("response length differs from row count");
  if (n <= k)
    throw ModelError(fmt::format("too few rows for least squares: {} rows, {} encoded features",
                                 n, encoded.cols()));
  Eigen::MatrixXd design(n, k);
  design.col(0).setOnes();
  design.rightCols(k - 1) = encoded;
  if (auto bad = first_dependent_column(design)) {
    const std::string name =
        *bad == 0 ? std::string("(intercept)") : encoder.encoded_names()[static_cast<std::size_t>(*bad - 1)];
    throw RankDeficiencyError(
        fmt::format("design matrix is rank deficient: column '{}' is a linear combination of "
                    "earlier columns",
                    name),
        name);
  }
  const auto fit = least_squares(design, y);
  LinearModel m;
  m.encoder = encoder;
  m.intercept = fit.coefficients(0);
  m.coefficients = fit.coefficients.tail(k - 1);
  m.means.resize(k - 1);
  for (Eigen::Index j = 0; j < k - 1; ++j) m.means(j) = sequential_mean(encoded.col(j));
  const Eigen::VectorXd se = (fit.unscaled_covariance.diagonal() * fit.residual_variance).cwiseMax(0.0).cwiseSqrt();
  m.intercept_std_error = se(0);
  m.std_errors = se.tail(k - 1);
  m.residual_variance = fit.residual_variance;
  m.n_train = static_cast<std::size_t>(n);
  return m;
}

LinearModel fit_ols(const Dataset& dataset, std::size_t response) {
  const Dataset d = dataset.with_response(response);
  const FeatureSchema schema = d.feature_schema();
  const Eigen::MatrixXd rows = d.feature_matrix();
  return fit_ols(FeatureEncoder::fit(schema, rows), rows, d.response());
}

Eigen::VectorXd KernelRidgeModel::score(const Eigen::MatrixXd& rows) const {
  const Eigen::Index p = points.rows();
  Eigen::VectorXd out(rows.rows());
  Eigen::VectorXd z(p);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    z = (rows.row(i).transpose() - centre).cwiseQuotient(scale);
    double s = 0.0;
    for (Eigen::Index t = 0; t < points.cols(); ++t) {
      const double* pt = points.col(t).data();
      double d2 = 0.0;
      for (Eigen::Index j = 0; j < p; ++j) {
        const double d = pt[j] - z(j);
        d2 += d * d;
      }
      s += dual(t) * std::exp(-gamma * d2);
    }
    out(i) = offset + s;
  }
  return out;
}

const char* to_string(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::kConstant: return "constant";
    case PredictorKind::kLinear: return "linear";
    case PredictorKind::kKernelRidge: return "kernel-ridge";
    case PredictorKind::kExternal: return "external";
    case PredictorKind::kFunction: return "function";
  }
  return "unknown";
}

Predictor Predictor::constant(FeatureSchema schema, double value) {
  if (!std::isfinite(value)) throw ModelError("constant predictor value must be finite");
  Predictor p(PredictorKind::kConstant, std::move(schema));
  p.constant_ = value;
  return p;
}

Predictor Predictor::linear(LinearModel model) {
  Predictor p(PredictorKind::kLinear, model.encoder.schema());
  p.linear_ = std::make_shared<const LinearModel>(std::move(model));
  return p;
}

Predictor Predictor::kernel_ridge(FeatureSchema schema, KernelRidgeModel model) {
  Predictor p(PredictorKind::kKernelRidge, std::move(schema));
  p.kernel_ = std::make_shared<const KernelRidgeModel>(std::move(model));
  return p;
}

Predictor Predictor::external(FeatureSchema schema, std::vector<std::string> command) {
  if (command.empty()) throw UsageError("external scorer command is empty");
  Predictor p(PredictorKind::kExternal, std::move(schema));
  p.command_ = std::move(command);
  return p;
}

Predictor Predictor::function(FeatureSchema schema, BatchFunction fn) {
  Predictor p(PredictorKind::kFunction, std::move(schema));
  p.fn_ = std::move(fn);
  return p;
}

Eigen::VectorXd Predictor::score(const Eigen::MatrixXd& rows) const {
  if (static_cast<std::size_t>(rows.cols()) != schema_.size())
    throw DataError(fmt::format("rows have {} columns, predictor expects {} features", rows.cols(),
                                schema_.size()));
  if (rows.rows() == 0) return Eigen::VectorXd(0);
  Eigen::VectorXd out;
  switch (kind_) {
    case PredictorKind::kConstant:
      out = Eigen::VectorXd::Constant(rows.rows(), constant_);
      break;
    case PredictorKind::kLinear:
      out = linear_->score(rows);
      break;
    case PredictorKind::kKernelRidge:
      out = kernel_->score(rows);
      break;
    case PredictorKind::kFunction:
      out = fn_(rows);
      break;
    case PredictorKind::kExternal: {
      const ProcessResult r = run_process(command_, encode_scoring_request(schema_, rows));
      if (r.exit_status != 0)
        throw ScorerError(ScorerError::Kind::kNonzeroExit,
                          fmt::format("scorer '{}' exited with status {}{}{}", command_.front(),
                                      r.exit_status, r.stderr_text.empty() ? "" : ": ",
                                      r.stderr_text),
                          r.stderr_text, r.exit_status);
      out = decode_scoring_response(r.stdout_text, rows.rows(), r.stderr_text);
      break;
    }
  }
  if (out.size() != rows.rows())
    throw ModelError(fmt::format("predictor returned {} scores for {} rows", out.size(), rows.rows()));
  if (!out.allFinite()) throw ModelError("predictor returned a non-finite score");
  return out;
}

double Predictor::score(const Observation& obs) const {
  return score(Eigen::MatrixXd(obs.values.transpose()))(0);
}

Predictor fit_kernel_ridge(const Dataset& dataset, std::size_t response, double gamma, double ridge) {
  if (!(gamma > 0) || !(ridge > 0)) throw ModelError("kernel ridge needs gamma > 0 and ridge > 0");
  const Dataset d = dataset.with_response(response);
  const FeatureSchema schema = d.feature_schema();
  if (schema.has_categorical()) throw ModelError("kernel ridge supports numeric features only");
  const Eigen::MatrixXd x = d.feature_matrix();
  const Eigen::VectorXd y = d.response();
  const Eigen::Index n = x.rows();

  KernelRidgeModel m;
  m.gamma = gamma;
  m.ridge = ridge;
  m.centre.resize(x.cols());
  m.scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    m.centre(j) = sequential_mean(x.col(j));
    const double ss = (x.col(j).array() - m.centre(j)).square().sum();
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    m.scale(j) = sd > 0 ? sd : 1.0;
  }
  m.points = ((x.rowwise() - m.centre.transpose()).array().rowwise() / m.scale.transpose().array())
                 .matrix()
                 .transpose();
  m.offset = sequential_mean(y);

  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0 + ridge;
    for (Eigen::Index t = 0; t < i; ++t) {
      const double v = std::exp(-gamma * (m.points.col(i) - m.points.col(t)).squaredNorm());
      k(i, t) = v;
      k(t, i) = v;
    }
  }
  const Eigen::VectorXd centred = y.array() - m.offset;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() == Eigen::Success) {
    m.dual = llt.solve(centred);
  } else {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(k);
    if (ldlt.info() != Eigen::Success) throw ModelError("kernel ridge system could not be factorized");
    m.dual = ldlt.solve(centred);
  }
  if (!m.dual.allFinite()) throw ModelError("kernel ridge solve produced non-finite weights");
  return Predictor::kernel_ridge(schema, std::move(m));
}

Predictor external_scorer(std::vector<std::string> command, FeatureSchema schema) {
  return Predictor::external(std::move(schema), std::move(command));
}

}  // namespace explain
