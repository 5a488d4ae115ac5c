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

#include "strikeaudit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>
#include <utility>

#include "csv.hpp"
#include "strikeaudit/errors.hpp"
#include "strikeaudit/random.hpp"

namespace strikeaudit {
namespace {

bool is_required(const std::string& name) {
  for (const char* r : kRequiredColumns) {
    if (name == r) return true;
  }
  return false;
}

bool is_race_name(const std::string& name) {
  for (const char* r : kRaceColumnNames) {
    if (name == r) return true;
  }
  return false;
}

bool parse_flag(const std::string& cell, std::size_t row, const std::string& column) {
  if (cell == "1") return true;
  if (cell == "0") return false;
  throw ParseError(row, column, "expected 0 or 1, got '" + cell + "'");
}

Answer parse_answer(const std::string& cell, std::size_t row,
                    const std::string& column) {
  if (cell == "1") return Answer::kYes;
  if (cell == "0") return Answer::kNo;
  if (cell.empty()) return Answer::kMissing;
  throw ParseError(row, column, "expected 0, 1 or empty, got '" + cell + "'");
}

std::string answer_cell(Answer a) {
  switch (a) {
    case Answer::kYes:
      return "1";
    case Answer::kNo:
      return "0";
    case Answer::kMissing:
      break;
  }
  return "";
}

}  // namespace

JurorTable read_csv(std::istream& in, std::span<const std::string> catalog) {
  std::vector<std::string> header;
  if (!csv::read_row(in, header)) throw SchemaError("empty CSV: no header row");
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) {
    header[0].erase(0, 3);
  }

  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!position.emplace(header[i], i).second) {
      throw SchemaError("duplicate column '" + header[i] + "'");
    }
  }
  for (const char* required : kRequiredColumns) {
    if (!position.contains(required)) {
      throw SchemaError(std::string("missing required column '") + required + "'");
    }
  }

  JurorTable table;
  if (catalog.empty()) {
    for (const std::string& name : header) {
      if (!is_required(name)) table.feature_catalog.push_back(name);
    }
  } else {
    for (const std::string& name : catalog) {
      if (is_required(name)) {
        throw SchemaError("catalog feature '" + name + "' clashes with a required column");
      }
      if (!position.contains(name)) {
        throw SchemaError("missing feature column '" + name + "'");
      }
      table.feature_catalog.push_back(name);
    }
  }

  const std::size_t trial_col = position.at("trial_id");
  const std::size_t juror_col = position.at("juror_id");
  const std::size_t black_col = position.at("is_black");
  const std::size_t struck_col = position.at("struck_by_state");
  const std::size_t eligible_col = position.at("eligible");

  std::set<std::pair<std::string, std::string>> seen;
  std::vector<std::string> fields;
  std::size_t row = 0;
  while (csv::read_row(in, fields)) {
    ++row;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != header.size()) {
      throw ParseError(row, "*", "expected " + std::to_string(header.size()) +
                                     " fields, found " + std::to_string(fields.size()));
    }
    JurorRecord r;
    r.trial_id = fields[trial_col];
    r.juror_id = fields[juror_col];
    r.is_black = parse_flag(fields[black_col], row, "is_black");
    r.eligible = parse_flag(fields[eligible_col], row, "eligible");
    if (fields[struck_col].empty() && !r.eligible) {
      r.struck_by_state = false;
    } else {
      r.struck_by_state = parse_flag(fields[struck_col], row, "struck_by_state");
    }
    for (const std::string& name : table.feature_catalog) {
      r.answers.emplace(name, parse_answer(fields[position.at(name)], row, name));
    }
    if (!seen.emplace(r.trial_id, r.juror_id).second) {
      throw ParseError(row, "juror_id",
                       "duplicate juror '" + r.juror_id + "' in trial '" + r.trial_id + "'");
    }
    table.records.push_back(std::move(r));
  }
  return table;
}

JurorTable load_csv(const std::filesystem::path& path,
                    std::span<const std::string> catalog) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open '" + path.string() + "'");
  return read_csv(in, catalog);
}

void write_csv(const JurorTable& table, std::ostream& out) {
  std::vector<std::string> fields(std::begin(kRequiredColumns),
                                  std::end(kRequiredColumns));
  fields.insert(fields.end(), table.feature_catalog.begin(),
                table.feature_catalog.end());
  csv::write_row(out, fields);
  for (const JurorRecord& r : table.records) {
    fields = {r.trial_id, r.juror_id, r.is_black ? "1" : "0",
              r.struck_by_state ? "1" : "0", r.eligible ? "1" : "0"};
    for (const std::string& name : table.feature_catalog) {
      auto it = r.answers.find(name);
      fields.push_back(it == r.answers.end() ? "" : answer_cell(it->second));
    }
    csv::write_row(out, fields);
  }
}

void write_csv(const JurorTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  write_csv(table, out);
}

JurorTable filter_eligible(const JurorTable& table) {
  JurorTable out;
  out.feature_catalog = table.feature_catalog;
  for (const JurorRecord& r : table.records) {
    if (r.eligible) out.records.push_back(r);
  }
  return out;
}

std::optional<std::size_t> FeatureMatrix::column_index(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) return std::nullopt;
  return static_cast<std::size_t>(it - columns.begin());
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  FeatureMatrix out;
  out.columns = columns;
  out.race_columns = race_columns;
  out.dropped_columns = dropped_columns;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= this->rows()) throw ArgumentError("row index out of range");
    const auto src = static_cast<Eigen::Index>(rows[i]);
    out.x.row(static_cast<Eigen::Index>(i)) = x.row(src);
    out.y(static_cast<Eigen::Index>(i)) = y(src);
  }
  return out;
}

FeatureMatrix FeatureMatrix::drop_columns(std::span<const std::size_t> drop) const {
  std::vector<bool> dropped(cols(), false);
  for (std::size_t c : drop) {
    if (c >= cols()) throw ArgumentError("column index out of range");
    dropped[c] = true;
  }
  FeatureMatrix out;
  out.y = y;
  out.dropped_columns = dropped_columns;
  std::vector<Eigen::Index> keep;
  for (std::size_t c = 0; c < cols(); ++c) {
    if (dropped[c]) continue;
    if (std::binary_search(race_columns.begin(), race_columns.end(), c)) {
      out.race_columns.push_back(keep.size());
    }
    keep.push_back(static_cast<Eigen::Index>(c));
    out.columns.push_back(columns[c]);
  }
  out.x.resize(x.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    out.x.col(static_cast<Eigen::Index>(j)) = x.col(keep[j]);
  }
  return out;
}

FeatureMatrix build_matrix(const JurorTable& table, MissingPolicy policy) {
  if (table.empty()) throw DegenerateDataError("cannot build a matrix from an empty table");

  std::vector<std::string> names{"is_black"};
  names.insert(names.end(), table.feature_catalog.begin(), table.feature_catalog.end());

  std::vector<const JurorRecord*> kept;
  for (const JurorRecord& r : table.records) {
    if (policy == MissingPolicy::kDropRow) {
      bool missing = false;
      for (const std::string& name : table.feature_catalog) {
        auto it = r.answers.find(name);
        if (it == r.answers.end() || it->second == Answer::kMissing) {
          missing = true;
          break;
        }
      }
      if (missing) continue;
    }
    kept.push_back(&r);
  }
  if (kept.empty()) {
    throw DegenerateDataError("no rows left after dropping rows with missing answers");
  }

  const auto n = static_cast<Eigen::Index>(kept.size());
  Eigen::MatrixXd full(n, static_cast<Eigen::Index>(names.size()));
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const JurorRecord& r = *kept[static_cast<std::size_t>(i)];
    full(i, 0) = r.is_black ? 1.0 : 0.0;
    for (std::size_t j = 0; j < table.feature_catalog.size(); ++j) {
      auto it = r.answers.find(table.feature_catalog[j]);
      const bool yes = it != r.answers.end() && it->second == Answer::kYes;
      full(i, static_cast<Eigen::Index>(j + 1)) = yes ? 1.0 : 0.0;
    }
    y(i) = r.struck_by_state ? 1.0 : 0.0;
  }

  FeatureMatrix m;
  m.y = std::move(y);
  std::vector<Eigen::Index> keep;
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto col = full.col(static_cast<Eigen::Index>(j));
    if (col.minCoeff() == col.maxCoeff()) {
      m.dropped_columns.push_back(names[j]);
      continue;
    }
    if (is_race_name(names[j])) m.race_columns.push_back(keep.size());
    keep.push_back(static_cast<Eigen::Index>(j));
    m.columns.push_back(names[j]);
  }
  m.x.resize(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    m.x.col(static_cast<Eigen::Index>(j)) = full.col(keep[j]);
  }
  return m;
}

SplitResult split(const FeatureMatrix& m, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ArgumentError("train_fraction must lie in (0, 1)");
  }
  if (m.rows() < 10) throw DegenerateDataError("split needs at least 10 rows");

  std::vector<std::size_t> strata[2];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    strata[m.y(static_cast<Eigen::Index>(i)) == 1.0 ? 1 : 0].push_back(i);
  }

  SplitResult out;
  for (int label = 0; label < 2; ++label) {
    std::vector<std::size_t>& stratum = strata[label];
    if (stratum.size() < 2) {
      throw StratificationError("class " + std::to_string(label) + " has " +
                                std::to_string(stratum.size()) +
                                " rows; stratified split needs at least 2");
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(label)));
    rng.shuffle(std::span<std::size_t>(stratum));
    auto take = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(stratum.size())));
    take = std::clamp<std::size_t>(take, 1, stratum.size() - 1);
    out.train_rows.insert(out.train_rows.end(), stratum.begin(),
                          stratum.begin() + static_cast<std::ptrdiff_t>(take));
    out.test_rows.insert(out.test_rows.end(),
                         stratum.begin() + static_cast<std::ptrdiff_t>(take),
                         stratum.end());
  }
  std::sort(out.train_rows.begin(), out.train_rows.end());
  std::sort(out.test_rows.begin(), out.test_rows.end());
  out.train = m.select_rows(out.train_rows);
  out.test = m.select_rows(out.test_rows);
  return out;
}

std::vector<std::size_t> stratified_folds(std::span<const double> labels,
                                          std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw ArgumentError("need at least 2 folds");
  std::vector<std::size_t> strata[2];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    strata[labels[i] == 1.0 ? 1 : 0].push_back(i);
  }
  std::vector<std::size_t> assignment(labels.size());
  std::size_t dealt = 0;
  for (int label = 0; label < 2; ++label) {
    std::vector<std::size_t>& stratum = strata[label];
    if (stratum.size() < folds) {
      throw StratificationError("class " + std::to_string(label) + " has " +
                                std::to_string(stratum.size()) + " rows, fewer than " +
                                std::to_string(folds) + " folds");
    }
    Rng rng(derive_seed(seed, 100 + static_cast<std::uint64_t>(label)));
    rng.shuffle(std::span<std::size_t>(stratum));
    // Continue dealing where the previous class stopped so fold sizes
    // differ by at most one overall.
    for (std::size_t row : stratum) assignment[row] = dealt++ % folds;
  }
  return assignment;
}

std::vector<std::size_t> fold_rows(std::span<const std::size_t> assignment,
                                   std::size_t fold, bool in_fold) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if ((assignment[i] == fold) == in_fold) rows.push_back(i);
  }
  return rows;
}

}  // namespace strikeaudit
