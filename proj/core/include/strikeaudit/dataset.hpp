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

#ifndef STRIKEAUDIT_DATASET_HPP_
#define STRIKEAUDIT_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace strikeaudit {

// A voir-dire answer. Cells "1", "0" and "" map to yes, no and missing.
enum class Answer : std::uint8_t { kNo, kYes, kMissing };

struct JurorRecord {
  std::string trial_id;
  std::string juror_id;
  bool is_black = false;
  bool struck_by_state = false;  // prediction target
  std::map<std::string, Answer> answers;
  bool eligible = true;  // could be struck by the State

  friend bool operator==(const JurorRecord&, const JurorRecord&) = default;
};

struct JurorTable {
  std::vector<JurorRecord> records;
  std::vector<std::string> feature_catalog;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  friend bool operator==(const JurorTable&, const JurorTable&) = default;
};

// Columns every juror file must carry, in the order write_csv emits them.
inline constexpr const char* kRequiredColumns[] = {
    "trial_id", "juror_id", "is_black", "struck_by_state", "eligible"};

// Column names treated as race-related when building a design matrix.
inline constexpr const char* kRaceColumnNames[] = {"is_black", "same_race"};

// Reads a juror CSV. `catalog` selects and orders the voir-dire feature
// columns; when empty, every non-required header column is a feature, in
// header order.
//
// Throws SchemaError when a required or catalog column is absent and
// ParseError (with row and column) for malformed cells or duplicate juror
// ids within a trial.
JurorTable load_csv(const std::filesystem::path& path,
                    std::span<const std::string> catalog = {});
JurorTable read_csv(std::istream& in, std::span<const std::string> catalog = {});

void write_csv(const JurorTable& table, std::ostream& out);
void write_csv(const JurorTable& table, const std::filesystem::path& path);

// Records with eligible = true, in their original order.
JurorTable filter_eligible(const JurorTable& table);

enum class MissingPolicy { kAsNo, kDropRow };

// Binary design matrix with named columns and a 0/1 target.
//
// Constructed matrices never contain a constant column. Row subsets taken
// later (splits, folds) may, and the fitting code tolerates that.
struct FeatureMatrix {
  Eigen::MatrixXd x;  // n x p, entries 0 or 1
  Eigen::VectorXd y;  // n, entries 0 or 1
  std::vector<std::string> columns;
  std::vector<std::size_t> race_columns;  // sorted ascending
  std::vector<std::string> dropped_columns;  // constant at construction

  std::size_t rows() const { return static_cast<std::size_t>(x.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(x.cols()); }

  std::optional<std::size_t> column_index(const std::string& name) const;

  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
  FeatureMatrix drop_columns(std::span<const std::size_t> columns) const;
  FeatureMatrix without_race_columns() const {
    return drop_columns(race_columns);
  }
};

// Builds the design matrix. Column 0 is `is_black` (taken from the record
// field), followed by catalog features. Constant columns are dropped and
// listed in `dropped_columns`.
//
// Throws DegenerateDataError for an empty table or when kDropRow removes
// every row.
FeatureMatrix build_matrix(const JurorTable& table,
                           MissingPolicy policy = MissingPolicy::kAsNo);

struct SplitResult {
  FeatureMatrix train;
  FeatureMatrix test;
  std::vector<std::size_t> train_rows;  // indices into the input, ascending
  std::vector<std::size_t> test_rows;
};

// Outcome-stratified train/test split. Each class contributes
// round(train_fraction * class_size) rows to train, clamped so both sides
// keep at least one row of each class.
//
// Throws ArgumentError for train_fraction outside (0, 1),
// DegenerateDataError for fewer than 10 rows and StratificationError when a
// class has fewer than 2 rows.
SplitResult split(const FeatureMatrix& m, double train_fraction,
                  std::uint64_t seed);

// Fold id in [0, folds) for each row, stratified by label. Throws
// StratificationError when some fold would lack a class.
std::vector<std::size_t> stratified_folds(std::span<const double> labels,
                                          std::size_t folds,
                                          std::uint64_t seed);

// Row indices (ascending) with / without the given fold id.
std::vector<std::size_t> fold_rows(std::span<const std::size_t> assignment,
                                   std::size_t fold, bool in_fold);

}  // namespace strikeaudit

#endif  // STRIKEAUDIT_DATASET_HPP_
