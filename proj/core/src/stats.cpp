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

#include "strikeaudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>

#include "strikeaudit/errors.hpp"

namespace strikeaudit {
namespace {

constexpr double kFisherRelativeSlack = 1e-7;

class LogFactorialCache {
 public:
  std::shared_ptr<const std::vector<double>> upto(std::int64_t n) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!table_ || static_cast<std::int64_t>(table_->size()) <= n) {
      std::size_t size = std::max<std::size_t>(
          static_cast<std::size_t>(n) + 1,
          table_ ? 2 * table_->size() : std::size_t{256});
      auto grown = std::make_shared<std::vector<double>>(size);
      for (std::size_t k = 0; k < size; ++k) {
        (*grown)[k] = std::lgamma(static_cast<double>(k) + 1.0);
      }
      table_ = std::move(grown);
    }
    return table_;
  }

 private:
  std::mutex mutex_;
  std::shared_ptr<const std::vector<double>> table_;
};

LogFactorialCache& cache() {
  static LogFactorialCache instance;
  return instance;
}

void check_scores_and_labels(std::span<const double> scores,
                             std::span<const double> labels,
                             std::size_t& positives, std::size_t& negatives) {
  if (scores.size() != labels.size()) {
    throw ArgumentError("scores and labels differ in length");
  }
  positives = 0;
  negatives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i])) throw ArgumentError("NaN score");
    if (labels[i] == 1.0) {
      ++positives;
    } else if (labels[i] == 0.0) {
      ++negatives;
    } else {
      throw ArgumentError("labels must be 0 or 1");
    }
  }
  if (positives == 0 || negatives == 0) {
    throw UndefinedMetricError("AUC needs both positive and negative labels");
  }
}

}  // namespace

bool ContingencyTable::degenerate() const {
  return a + b == 0 || c + d == 0 || a + c == 0 || b + d == 0;
}

double log_factorial(std::int64_t k) {
  if (k < 0) throw ArgumentError("log_factorial of negative value");
  return (*cache().upto(k))[static_cast<std::size_t>(k)];
}

std::optional<double> fisher_exact(const ContingencyTable& t) {
  if (t.a < 0 || t.b < 0 || t.c < 0 || t.d < 0) {
    throw ArgumentError("contingency counts must be non-negative");
  }
  if (t.degenerate()) return std::nullopt;

  const std::int64_t row1 = t.a + t.b;
  const std::int64_t row2 = t.c + t.d;
  const std::int64_t col1 = t.a + t.c;
  const std::int64_t n = t.total();
  const std::int64_t lo = std::max<std::int64_t>(0, col1 - row2);
  const std::int64_t hi = std::min(row1, col1);

  // Log point probabilities relative to the mode, built by the ratio
  // recurrence outward from it. Differencing log-factorials instead loses
  // about 1e-12 of relative accuracy once the total reaches the thousands.
  const std::int64_t mode = std::clamp((row1 + 1) * (col1 + 1) / (n + 2), lo, hi);
  std::vector<double> lw(static_cast<std::size_t>(hi - lo + 1));
  auto at = [&](std::int64_t x) -> double& { return lw[static_cast<std::size_t>(x - lo)]; };
  // log P(x + 1) - log P(x)
  auto step_up = [&](std::int64_t x) {
    return std::log(static_cast<double>(row1 - x) * static_cast<double>(col1 - x)) -
           std::log(static_cast<double>(x + 1) * static_cast<double>(row2 - col1 + x + 1));
  };
  at(mode) = 0.0;
  for (std::int64_t x = mode; x < hi; ++x) at(x + 1) = at(x) + step_up(x);
  for (std::int64_t x = mode; x > lo; --x) at(x - 1) = at(x) - step_up(x - 1);

  const double cutoff = at(t.a) + std::log1p(kFisherRelativeSlack);
  double tail = 0.0;
  double total = 0.0;
  for (double w : lw) {
    const double e = std::exp(w);
    total += e;
    if (w <= cutoff) tail += e;
  }
  const double p = tail / total;
  return std::clamp(p, 0.0, 1.0);
}

std::vector<double> holm_adjust(std::span<const double> p_values) {
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ArgumentError("p-values must lie in [0, 1]");
    }
  }
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return p_values[l] < p_values[r];
  });

  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t rank = 0; rank < m; ++rank) {
    const std::size_t i = order[rank];
    running = std::max(running, static_cast<double>(m - rank) * p_values[i]);
    adjusted[i] = std::min(1.0, running);
  }
  return adjusted;
}

double auc(std::span<const double> scores, std::span<const double> labels) {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  check_scores_and_labels(scores, labels, positives, negatives);

  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t l, std::size_t r) { return scores[l] < scores[r]; });

  // Sum of midranks (1-based) over positives.
  double positive_rank_sum = 0.0;
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && scores[order[end]] == scores[order[start]]) ++end;
    const double midrank = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t k = start; k < end; ++k) {
      if (labels[order[k]] == 1.0) positive_rank_sum += midrank;
    }
    start = end;
  }
  const double np = static_cast<double>(positives);
  const double nn = static_cast<double>(negatives);
  const double u = positive_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * nn);
}

RocCurve roc_points(std::span<const double> scores,
                    std::span<const double> labels) {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  check_scores_and_labels(scores, labels, positives, negatives);

  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t l, std::size_t r) { return scores[l] > scores[r]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  // Twice the trapezoid area in count units, kept integral until the end.
  std::uint64_t doubled_area = 0;
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start;
    std::size_t group_tp = 0;
    std::size_t group_fp = 0;
    while (end < n && scores[order[end]] == scores[order[start]]) {
      if (labels[order[end]] == 1.0) {
        ++group_tp;
      } else {
        ++group_fp;
      }
      ++end;
    }
    doubled_area += static_cast<std::uint64_t>(group_fp) * (2 * tp + group_tp);
    tp += group_tp;
    fp += group_fp;
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                            static_cast<double>(tp) / static_cast<double>(positives)});
    start = end;
  }
  curve.auc = static_cast<double>(doubled_area) /
              (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
  return curve;
}

double trapezoid_area(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) *
            (points[i].tpr + points[i - 1].tpr) / 2.0;
  }
  return area;
}

void write_roc_csv(const RocCurve& curve, std::ostream& out) {
  out << "fpr,tpr\n";
  const auto precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (const RocPoint& p : curve.points) out << p.fpr << ',' << p.tpr << '\n';
  out.precision(precision);
}

}  // namespace strikeaudit
