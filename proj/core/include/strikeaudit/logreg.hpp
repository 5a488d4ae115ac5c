// Copyright 2026 The StrikeAudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef STRIKEAUDIT_LOGREG_HPP_
#define STRIKEAUDIT_LOGREG_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "strikeaudit/dataset.hpp"

namespace strikeaudit {

struct FitSettings {
  double ridge = 0.0;  // quadratic penalty on coefficients; intercept is free
  double tolerance = 1e-8;  // on the max absolute gradient component
  std::size_t max_iterations = 100;

  // Defaults with ridge = 1/n.
  static FitSettings for_rows(std::size_t n);
};

struct FitDiagnostics {
  double final_nll = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double max_abs_gradient = 0.0;
  // Set when ridge = 0 and the linear predictor diverged (perfect or
  // quasi-complete separation). Implies converged = false.
  bool separation = false;
  // Objective after each accepted Newton step, starting point first.
  std::vector<double> objective_trace;
};

// p(struck) = sigmoid(intercept + sum_j beta_j x_j) over the support columns.
struct LogisticModel {
  std::vector<std::size_t> support;  // ascending column indices
  Eigen::VectorXd beta;              // aligned with support
  double intercept = 0.0;
  double ridge = 0.0;
  FitDiagnostics diagnostics;
};

// Penalized negative log-likelihood:
//   sum_i [log(1 + exp(eta_i)) - y_i eta_i] + ridge/2 * |beta|^2.
double nll(const LogisticModel& model, const FeatureMatrix& m);

// Gradient of nll in (intercept, beta), intercept first.
Eigen::VectorXd gradient(const LogisticModel& model, const FeatureMatrix& m);

// Damped Newton (step halving on nll) from the zero vector. With ridge > 0
// the objective is strictly convex and a converged fit is its unique
// minimizer. Never loops past settings.max_iterations.
//
// Throws ArgumentError for out-of-range support indices or an empty matrix.
LogisticModel fit(const FeatureMatrix& m, std::span<const std::size_t> support,
                  const FitSettings& settings);

Eigen::VectorXd predict_proba(const LogisticModel& model, const FeatureMatrix& m);

struct WaldResult {
  // ("intercept", p) first, then one entry per support column by name.
  std::vector<std::pair<std::string, double>> p_values;
  std::vector<double> standard_errors;  // same order
  // True when the model was fit with ridge > 0; the normal approximation
  // then ignores the penalty's bias.
  bool approximate = false;
};

// Two-sided Wald p-values from the inverse observed information.
//
// Throws ContractViolation for a non-converged model and
// CollinearityError (naming the dependent columns) when the information
// matrix is singular.
WaldResult wald_pvalues(const LogisticModel& model, const FeatureMatrix& m);

// Rows packed as bitmasks and collapsed to distinct covariate patterns per
// support, so repeated fits over many supports cost O(patterns) instead of
// O(rows). Requires at most 63 columns.
class BinaryDesign {
 public:
  explicit BinaryDesign(const FeatureMatrix& m);

  std::size_t rows() const { return labels_.size(); }
  std::size_t cols() const { return cols_; }

  // Same contract as strikeaudit::fit. `warm_start`, when non-empty, holds
  // (intercept, beta...) aligned with the sorted support.
  LogisticModel fit(std::span<const std::size_t> support, const FitSettings& settings,
                    std::span<const double> warm_start = {}) const;

 private:
  std::vector<std::uint64_t> row_bits_;
  std::vector<std::uint8_t> labels_;
  std::size_t cols_ = 0;
};

}  // namespace strikeaudit

#endif  // STRIKEAUDIT_LOGREG_HPP_
