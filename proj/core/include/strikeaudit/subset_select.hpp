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

#ifndef STRIKEAUDIT_SUBSET_SELECT_HPP_
#define STRIKEAUDIT_SUBSET_SELECT_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "strikeaudit/dataset.hpp"
#include "strikeaudit/logreg.hpp"

namespace strikeaudit {

inline constexpr std::size_t kDefaultNodeBudget = 1'000'000;

struct SubsetResult {
  std::size_t k = 0;
  std::vector<std::size_t> support;  // ascending, size <= k
  LogisticModel model;
  double objective = 0.0;  // penalized nll on the fitting data
  // True when branch-and-bound finished within its node budget, so no
  // support of size <= k has a lower objective (up to fit tolerance).
  bool certified_optimal = false;
  std::size_t nodes = 0;
};

struct SubsetSearchOptions {
  std::size_t node_budget = kDefaultNodeBudget;
  // Extra incumbent candidates tried before the search (e.g. the optimum at
  // k - 1). Entries larger than k are ignored.
  std::vector<std::vector<std::size_t>> warm_supports;
};

// Exact cardinality-constrained logistic regression. The incumbent starts
// from forward selection improved by single swaps; branch-and-bound over
// include/exclude decisions then certifies it, bounding each node by the
// fit on every feature not yet excluded.
//
// Throws ArgumentError when k exceeds the column count.
SubsetResult best_subset(const FeatureMatrix& m, std::size_t k, const FitSettings& settings,
                         std::size_t node_budget = kDefaultNodeBudget);
SubsetResult best_subset(const BinaryDesign& design, std::size_t k,
                         const FitSettings& settings, const SubsetSearchOptions& options);

struct SubsetPathEntry {
  std::size_t k = 0;
  std::vector<std::size_t> support;  // refit on the full training data
  std::vector<double> fold_auc;
  double cv_auc_mean = 0.0;
  double cv_auc_sd = 0.0;  // sample standard deviation across folds
  double train_nll = 0.0;
  bool certified_optimal = false;
  LogisticModel model;
};

struct SubsetPath {
  std::vector<std::string> columns;
  std::vector<SubsetPathEntry> entries;  // k = 1 .. k_max
  std::size_t chosen_k = 0;  // argmax of cv_auc_mean, ties to smaller k
  double test_auc = 0.0;     // model at chosen_k scored once on the test set

  const SubsetPathEntry& chosen() const { return entries.at(chosen_k - 1); }
};

struct SubsetPathOptions {
  int threads = 1;
  std::size_t node_budget = kDefaultNodeBudget;
};

// Cross-validated model-size selection: for each k and each stratified fold,
// best_subset on the fold's training rows scored by AUC on its held-out
// rows; then refit at every k on all training rows.
//
// Throws ArgumentError for folds < 2 or k_max outside [1, p], and
// StratificationError when a fold lacks a class.
SubsetPath subset_path(const FeatureMatrix& train, const FeatureMatrix& test,
                       std::size_t k_max, std::size_t folds, std::uint64_t seed,
                       const FitSettings& settings, const SubsetPathOptions& options = {});

// Backward elimination by Wald p-value: for each threshold in turn, fit the
// current support (ridge 0) and drop every column whose p-value exceeds it.
// Returns the fit on the surviving support.
LogisticModel backward_stepwise(const FeatureMatrix& m,
                                std::span<const double> thresholds);
LogisticModel backward_stepwise(const FeatureMatrix& m);  // {0.1, 0.05}

struct ImportanceProfile {
  std::vector<std::string> columns;
  std::vector<std::size_t> ks;
  // Row r is subset size ks[r]; entry (r, j) = |beta_j| / sum |beta|, zero
  // for unselected columns.
  Eigen::MatrixXd importance;
};

ImportanceProfile importance_profile(const SubsetPath& path,
                                     std::span<const LogisticModel> models);
ImportanceProfile importance_profile(const SubsetPath& path);

}  // namespace strikeaudit

#endif  // STRIKEAUDIT_SUBSET_SELECT_HPP_
