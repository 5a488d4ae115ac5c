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


#ifndef STRIKEAUDIT_AUDIT_HPP_
#define STRIKEAUDIT_AUDIT_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "strikeaudit/dataset.hpp"
#include "strikeaudit/errors.hpp"
#include "strikeaudit/logreg.hpp"
#include "strikeaudit/subset_select.hpp"
#include "strikeaudit/tree_opt.hpp"

namespace strikeaudit {

struct DisparityFinding {
  int leaf = -1;
  std::vector<PathCondition> path;
  std::int64_t n_black = 0;
  std::int64_t struck_black = 0;
  std::int64_t n_nonblack = 0;
  std::int64_t struck_nonblack = 0;
  std::optional<double> rate_black;     // unset when n_black = 0
  std::optional<double> rate_nonblack;  // unset when n_nonblack = 0
  std::optional<double> p_raw;
  std::optional<double> p_adjusted;
  bool significant = false;  // p_adjusted < alpha_level
  bool skipped = false;
  std::string reason;  // why the test was skipped
};

// Routes every record through the tree (missing answers as "no"), tests
// black vs non-black strike rates per leaf with Fisher's exact test, and
// Holm-adjusts over the leaves whose table is testable. Leaves with a zero
// margin are skipped and left out of the correction. One finding per leaf,
// in leaf id order.
//
// Throws ContractViolation when the tree splits on a feature the table does
// not carry.
std::vector<DisparityFinding> leaf_disparity(const Tree& tree, const JurorTable& table,
                                             double alpha_level = 0.05);

struct AblationResult {
  double auc_full = 0.0;
  double auc_ablated = 0.0;
  SubsetPath full;
  SubsetPath ablated;
};

// Runs subset_path with and without the race columns under the same seed and
// settings. k_max is clamped to each matrix's column count.
//
// Throws ContractViolation when the matrices carry no race columns.
AblationResult ablation_auc(const FeatureMatrix& train, const FeatureMatrix& test,
                            std::size_t k_max, std::size_t folds, std::uint64_t seed,
                            const FitSettings& settings,
                            const SubsetPathOptions& options = {});

inline const std::vector<double>& default_alpha_grid() {
  static const std::vector<double> grid = {0.001, 0.0025, 0.005, 0.01, 0.02, 0.05};
  return grid;
}

struct AuditConfig {
  std::filesystem::path input;
  std::vector<std::string> catalog;  // empty: every non-required column
  std::uint64_t seed = 0;
  double train_fraction = 0.7;
  std::size_t k_max = 20;  // clamped to the column count
  std::size_t folds = 5;
  std::optional<double> ridge;  // unset: 1 / training rows
  MissingPolicy missing = MissingPolicy::kAsNo;
  TreeSettings tree;  // tree.seed and tree.threads are taken from above
  std::vector<double> alpha_grid = default_alpha_grid();
  double alpha_level = 0.05;
  int threads = 1;
  std::size_t node_budget = kDefaultNodeBudget;
};

struct Provenance {
  std::string input;
  std::string dataset_sha256;  // of the raw input bytes
  std::uint64_t seed = 0;
  std::size_t records = 0;
  std::size_t eligible_records = 0;
  std::size_t matrix_rows = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  double ridge = 0.0;
};

struct AuditReport {
  AuditConfig config;
  Provenance provenance;
  std::vector<std::string> dropped_columns;
  SubsetPath subset_path;
  ImportanceProfile importance;
  double auc_full = 0.0;
  double auc_ablated = 0.0;
  std::size_t ablated_chosen_k = 0;
  double tree_alpha = 0.0;
  std::vector<double> alpha_cv_error;  // aligned with config.alpha_grid
  Tree tree;
  std::vector<DisparityFinding> findings;

  const LogisticModel& chosen_model() const { return subset_path.chosen().model; }
};

// A pipeline stage failed. what() is prefixed with the stage name.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// load, filter_eligible, build_matrix, split, subset_path, importance,
// ablation, tree (race columns removed, alpha tuned by CV) and per-leaf
// disparity. Deterministic given the config.
//
// Library errors are rethrown as StageError; bad settings raise
// ArgumentError prefixed with the stage name.
AuditReport run_audit(const AuditConfig& cfg);

// Same pipeline on an in-memory table. `input_bytes` feeds the digest.
AuditReport run_audit(const AuditConfig& cfg, const JurorTable& table,
                      std::string_view input_bytes);

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

}  // namespace strikeaudit

#endif  // STRIKEAUDIT_AUDIT_HPP_
