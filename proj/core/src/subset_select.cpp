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

#include "strikeaudit/subset_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "strikeaudit/errors.hpp"
#include "strikeaudit/parallel.hpp"
#include "strikeaudit/stats.hpp"

namespace strikeaudit {
namespace {

constexpr double kPruneSlack = 1e-10;
constexpr double kTieSlack = 1e-9;
constexpr std::size_t kMaxSwapPasses = 50;

// Warm start for a fit on `support` taken from a fit on a superset.
std::vector<double> restrict_theta(const LogisticModel& from,
                                   std::span<const std::size_t> support) {
  std::vector<double> theta{from.intercept};
  for (std::size_t c : support) {
    auto it = std::lower_bound(from.support.begin(), from.support.end(), c);
    theta.push_back(it != from.support.end() && *it == c
                        ? from.beta(it - from.support.begin())
                        : 0.0);
  }
  return theta;
}

class BranchAndBound {
 public:
  BranchAndBound(const BinaryDesign& design, std::size_t k, const FitSettings& settings,
                 std::size_t budget)
      : design_(design), k_(k), settings_(settings), budget_(budget) {}

  // Offers a candidate incumbent. Lower objective wins; near-ties go to the
  // smaller, then lexicographically smaller, support.
  void consider(const LogisticModel& model) {
    const double obj = model.diagnostics.final_nll;
    bool better = !have_best_ || obj < best_.diagnostics.final_nll - kTieSlack;
    if (!better && std::abs(obj - best_.diagnostics.final_nll) <= kTieSlack) {
      better = model.support.size() < best_.support.size() ||
               (model.support.size() == best_.support.size() &&
                model.support < best_.support);
    }
    if (better) {
      best_ = model;
      have_best_ = true;
    }
  }

  LogisticModel fit(std::span<const std::size_t> support,
                    std::span<const double> warm = {}) const {
    return design_.fit(support, settings_, warm);
  }

  void forward_then_swap() {
    std::vector<std::size_t> support;
    LogisticModel current = fit(support);
    consider(current);
    while (support.size() < k_) {
      LogisticModel best_step;
      bool found = false;
      for (std::size_t j = 0; j < design_.cols(); ++j) {
        if (std::binary_search(support.begin(), support.end(), j)) continue;
        std::vector<std::size_t> trial = support;
        trial.insert(std::upper_bound(trial.begin(), trial.end(), j), j);
        LogisticModel m = fit(trial, restrict_theta(current, trial));
        if (!found || m.diagnostics.final_nll < best_step.diagnostics.final_nll) {
          best_step = std::move(m);
          found = true;
        }
      }
      if (!found) break;
      current = std::move(best_step);
      support = current.support;
      consider(current);
    }

    for (std::size_t pass = 0; pass < kMaxSwapPasses && !support.empty(); ++pass) {
      LogisticModel best_swap = current;
      for (std::size_t out : support) {
        for (std::size_t in = 0; in < design_.cols(); ++in) {
          if (std::binary_search(support.begin(), support.end(), in)) continue;
          std::vector<std::size_t> trial;
          for (std::size_t s : support) {
            if (s != out) trial.push_back(s);
          }
          trial.insert(std::upper_bound(trial.begin(), trial.end(), in), in);
          LogisticModel m = fit(trial, restrict_theta(current, trial));
          if (m.diagnostics.final_nll <
              best_swap.diagnostics.final_nll - kTieSlack) {
            best_swap = std::move(m);
          }
        }
      }
      if (best_swap.support == support) break;
      current = std::move(best_swap);
      support = current.support;
      consider(current);
    }
  }

  void run() {
    std::vector<std::size_t> all(design_.cols());
    std::iota(all.begin(), all.end(), std::size_t{0});
    LogisticModel root = fit(all, restrict_theta(best_, all));
    explore({}, std::move(all), root);
  }

  bool aborted() const { return aborted_; }
  std::size_t nodes() const { return nodes_; }
  const LogisticModel& best() const { return best_; }

 private:
  void explore(std::vector<std::size_t> included, std::vector<std::size_t> allowed,
               const LogisticModel& relaxation) {
    if (aborted_) return;
    if (++nodes_ > budget_) {
      aborted_ = true;
      return;
    }
    // Dropping columns cannot lower the optimum, so the fit on every still
    // allowed column bounds the whole subtree.
    const double bound = relaxation.diagnostics.converged
                             ? relaxation.diagnostics.final_nll
                             : -std::numeric_limits<double>::infinity();
    if (have_best_ && bound >= best_.diagnostics.final_nll - kPruneSlack) return;
    if (allowed.size() <= k_) {
      consider(relaxation);
      return;
    }
    if (included.size() == k_) {
      consider(fit(included, restrict_theta(relaxation, included)));
      return;
    }

    std::size_t branch = allowed.size();
    double largest = -1.0;
    for (std::size_t pos = 0; pos < allowed.size(); ++pos) {
      if (std::binary_search(included.begin(), included.end(), allowed[pos])) continue;
      const double magnitude = std::abs(relaxation.beta(static_cast<Eigen::Index>(pos)));
      if (magnitude > largest) {
        largest = magnitude;
        branch = pos;
      }
    }
    const std::size_t column = allowed[branch];

    std::vector<std::size_t> with = included;
    with.insert(std::upper_bound(with.begin(), with.end(), column), column);
    explore(std::move(with), allowed, relaxation);

    allowed.erase(allowed.begin() + static_cast<std::ptrdiff_t>(branch));
    LogisticModel child = fit(allowed, restrict_theta(relaxation, allowed));
    explore(std::move(included), std::move(allowed), child);
  }

  const BinaryDesign& design_;
  std::size_t k_;
  FitSettings settings_;
  std::size_t budget_;
  std::size_t nodes_ = 0;
  bool aborted_ = false;
  bool have_best_ = false;
  LogisticModel best_;
};

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mean = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double score_auc(const LogisticModel& model, const FeatureMatrix& m) {
  const Eigen::VectorXd scores = predict_proba(model, m);
  return auc(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())),
             std::span<const double>(m.y.data(), static_cast<std::size_t>(m.y.size())));
}

// best_subset for k = 1..k_max, each warm-started from the previous optimum
// so the objective is non-increasing in k.
std::vector<SubsetResult> nested_path(const BinaryDesign& design, std::size_t k_max,
                                      const FitSettings& settings, std::size_t budget) {
  std::vector<SubsetResult> out;
  SubsetSearchOptions options;
  options.node_budget = budget;
  for (std::size_t k = 1; k <= k_max; ++k) {
    out.push_back(best_subset(design, k, settings, options));
    options.warm_supports = {out.back().support};
  }
  return out;
}

}  // namespace

SubsetResult best_subset(const BinaryDesign& design, std::size_t k,
                         const FitSettings& settings, const SubsetSearchOptions& options) {
  if (k > design.cols()) {
    throw ArgumentError("k = " + std::to_string(k) + " exceeds " +
                        std::to_string(design.cols()) + " columns");
  }
  BranchAndBound search(design, k, settings, options.node_budget);
  search.forward_then_swap();
  for (const auto& support : options.warm_supports) {
    if (support.size() <= k) search.consider(search.fit(support));
  }
  if (k < design.cols()) search.run();

  SubsetResult result;
  result.k = k;
  result.model = search.best();
  result.support = result.model.support;
  result.objective = result.model.diagnostics.final_nll;
  result.certified_optimal = !search.aborted();
  result.nodes = search.nodes();
  return result;
}

SubsetResult best_subset(const FeatureMatrix& m, std::size_t k, const FitSettings& settings,
                         std::size_t node_budget) {
  SubsetSearchOptions options;
  options.node_budget = node_budget;
  return best_subset(BinaryDesign(m), k, settings, options);
}

SubsetPath subset_path(const FeatureMatrix& train, const FeatureMatrix& test,
                       std::size_t k_max, std::size_t folds, std::uint64_t seed,
                       const FitSettings& settings, const SubsetPathOptions& options) {
  if (folds < 2) throw ArgumentError("need at least 2 folds");
  if (k_max < 1 || k_max > train.cols()) {
    throw ArgumentError("k_max must lie in [1, " + std::to_string(train.cols()) + "]");
  }
  if (test.cols() != train.cols()) throw ArgumentError("train and test columns differ");

  const std::vector<std::size_t> assignment = stratified_folds(
      std::span<const double>(train.y.data(), train.rows()), folds, seed);

  // Work item f < folds is a CV fold; item `folds` is the full refit.
  std::vector<std::vector<SubsetResult>> results(folds + 1);
  std::vector<double> fold_auc(folds * k_max);
  parallel_for(folds + 1, options.threads, [&](std::size_t item) {
    if (item == folds) {
      results[item] = nested_path(BinaryDesign(train), k_max, settings, options.node_budget);
      return;
    }
    const FeatureMatrix fit_rows = train.select_rows(fold_rows(assignment, item, false));
    const FeatureMatrix held_out = train.select_rows(fold_rows(assignment, item, true));
    results[item] = nested_path(BinaryDesign(fit_rows), k_max, settings, options.node_budget);
    for (std::size_t k = 1; k <= k_max; ++k) {
      fold_auc[item * k_max + (k - 1)] = score_auc(results[item][k - 1].model, held_out);
    }
  });

  SubsetPath path;
  path.columns = train.columns;
  double best_mean = -1.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    SubsetPathEntry e;
    const SubsetResult& full = results[folds][k - 1];
    e.k = k;
    e.support = full.support;
    e.model = full.model;
    e.train_nll = full.objective;
    e.certified_optimal = full.certified_optimal;
    for (std::size_t f = 0; f < folds; ++f) e.fold_auc.push_back(fold_auc[f * k_max + (k - 1)]);
    e.cv_auc_mean = mean_of(e.fold_auc);
    e.cv_auc_sd = sample_sd(e.fold_auc);
    if (e.cv_auc_mean > best_mean) {
      best_mean = e.cv_auc_mean;
      path.chosen_k = k;
    }
    path.entries.push_back(std::move(e));
  }
  path.test_auc = score_auc(path.chosen().model, test);
  return path;
}

LogisticModel backward_stepwise(const FeatureMatrix& m, std::span<const double> thresholds) {
  if (thresholds.empty()) throw ArgumentError("need at least one threshold");
  for (double t : thresholds) {
    if (!(t > 0.0 && t <= 1.0)) throw ArgumentError("thresholds must lie in (0, 1]");
  }
  FitSettings settings;  // ridge 0 for textbook Wald inference
  std::vector<std::size_t> support(m.cols());
  std::iota(support.begin(), support.end(), std::size_t{0});

  for (double threshold : thresholds) {
    const LogisticModel model = fit(m, support, settings);
    const WaldResult wald = wald_pvalues(model, m);
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < model.support.size(); ++j) {
      // p_values[0] is the intercept, which is never dropped.
      if (wald.p_values[j + 1].second <= threshold) kept.push_back(model.support[j]);
    }
    support = std::move(kept);
  }
  return fit(m, support, settings);
}

LogisticModel backward_stepwise(const FeatureMatrix& m) {
  static constexpr double kDefaultThresholds[] = {0.1, 0.05};
  return backward_stepwise(m, kDefaultThresholds);
}

ImportanceProfile importance_profile(const SubsetPath& path,
                                     std::span<const LogisticModel> models) {
  if (models.size() != path.entries.size()) {
    throw ArgumentError("need one model per subset size");
  }
  ImportanceProfile profile;
  profile.columns = path.columns;
  profile.importance = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(models.size()),
                                             static_cast<Eigen::Index>(path.columns.size()));
  for (std::size_t r = 0; r < models.size(); ++r) {
    profile.ks.push_back(path.entries[r].k);
    const LogisticModel& model = models[r];
    const double total = model.beta.cwiseAbs().sum();
    if (total == 0.0) continue;
    for (std::size_t j = 0; j < model.support.size(); ++j) {
      profile.importance(static_cast<Eigen::Index>(r),
                         static_cast<Eigen::Index>(model.support[j])) =
          std::abs(model.beta(static_cast<Eigen::Index>(j))) / total;
    }
  }
  return profile;
}

ImportanceProfile importance_profile(const SubsetPath& path) {
  std::vector<LogisticModel> models;
  for (const SubsetPathEntry& e : path.entries) models.push_back(e.model);
  return importance_profile(path, models);
}

}  // namespace strikeaudit
