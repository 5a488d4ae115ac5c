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

#ifndef STRIKEAUDIT_STATS_HPP_
#define STRIKEAUDIT_STATS_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace strikeaudit {

// 2x2 table of counts. Rows are {black, non-black}; columns are
// {struck, not struck}:
//
//              struck   not struck
//   black        a          b
//   non-black    c          d
struct ContingencyTable {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t c = 0;
  std::int64_t d = 0;

  std::int64_t total() const { return a + b + c + d; }
  // True when a row or column sums to zero, making association untestable.
  bool degenerate() const;
};

// Two-sided Fisher exact test. The p-value sums the hypergeometric point
// probabilities of every table with the observed margins whose probability
// is at most that of the observed table (relative slack 1e-7).
//
// Returns std::nullopt when a margin is empty and the test is undefined.
// Throws ArgumentError on negative counts.
std::optional<double> fisher_exact(const ContingencyTable& table);

// Natural log of k! for k in [0, n]. Backed by a process-wide table that
// grows on demand; safe to call concurrently.
double log_factorial(std::int64_t k);

// Holm step-down adjustment. Output is in input order. Throws ArgumentError
// if any value lies outside [0, 1].
std::vector<double> holm_adjust(std::span<const double> p_values);

// Area under the ROC curve as the Mann-Whitney statistic with ties counted
// one half. Labels must be 0 or 1. Throws UndefinedMetricError when only one
// class is present.
double auc(std::span<const double> scores, std::span<const double> labels);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  // (0,0) through (1,1), one point per distinct score threshold.
  std::vector<RocPoint> points;
  double auc = 0.0;
};

RocCurve roc_points(std::span<const double> scores,
                    std::span<const double> labels);

double trapezoid_area(std::span<const RocPoint> points);

// CSV with header "fpr,tpr".
void write_roc_csv(const RocCurve& curve, std::ostream& out);

}  // namespace strikeaudit

#endif  // STRIKEAUDIT_STATS_HPP_
