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

#include "strikeaudit/tree_opt.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "strikeaudit/errors.hpp"
#include "strikeaudit/parallel.hpp"
#include "strikeaudit/random.hpp"

namespace strikeaudit {
namespace {

using Words = std::vector<std::uint64_t>;

constexpr double kImprovement = 1e-12;
constexpr double kInitialSplitProbability = 0.75;
constexpr std::size_t kMaxSweeps = 10'000;

std::int64_t popcount(const Words& w) {
  std::int64_t total = 0;
  for (std::uint64_t x : w) total += std::popcount(x);
  return total;
}

std::int64_t popcount_and(const Words& a, const Words& b) {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) total += std::popcount(a[i] & b[i]);
  return total;
}

// Rows as bitsets: one per column, plus labels.
struct Problem {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t words = 0;
  std::vector<Words> column;
  Words labels;
  Words all;
  std::size_t max_depth = 0;
  std::size_t min_leaf = 0;
  double alpha = 0.0;

  Problem(const FeatureMatrix& m, const TreeSettings& s)
      : n(m.rows()), p(m.cols()), words((m.rows() + 63) / 64),
        column(m.cols(), Words(words, 0)), labels(words, 0), all(words, 0),
        max_depth(s.max_depth), min_leaf(s.min_leaf), alpha(s.alpha) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t bit = std::uint64_t{1} << (i % 64);
      all[i / 64] |= bit;
      if (m.y(static_cast<Eigen::Index>(i)) != 0.0) labels[i / 64] |= bit;
      for (std::size_t j = 0; j < p; ++j) {
        if (m.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0.0) {
          column[j][i / 64] |= bit;
        }
      }
    }
  }
};

struct Cost {
  std::int64_t misclassified = 0;
  std::int64_t leaves = 0;
  bool feasible = true;

  Cost operator+(const Cost& o) const {
    return {misclassified + o.misclassified, leaves + o.leaves, feasible && o.feasible};
  }
};

double value(const Cost& c, const Problem& pr) {
  if (!c.feasible) return std::numeric_limits<double>::infinity();
  return static_cast<double>(c.misclassified) / static_cast<double>(pr.n) +
         pr.alpha * static_cast<double>(c.leaves);
}

struct SNode {
  int feature = -1;
  int left = -1;
  int right = -1;
};

class Evaluator {
 public:
  explicit Evaluator(const Problem& pr)
      : pr_(pr), scratch_(2 * (pr.max_depth + 2), Words(pr.words)) {}

  Cost leaf(const Words& rows) const {
    const std::int64_t count = popcount(rows);
    if (count < static_cast<std::int64_t>(pr_.min_leaf)) return {0, 1, false};
    const std::int64_t positives = popcount_and(rows, pr_.labels);
    return {std::min(positives, count - positives), 1, true};
  }

  Cost subtree(const std::vector<SNode>& nodes, int v, const Words& rows, std::size_t level) {
    const SNode& node = nodes[static_cast<std::size_t>(v)];
    if (node.feature < 0) return leaf(rows);
    return split(nodes, node.feature, node.left, node.right, rows, level);
  }

  // Cost of splitting `rows` on `feature` with the given child subtrees
  // (-1 for a fresh leaf).
  Cost split(const std::vector<SNode>& nodes, int feature, int left, int right,
             const Words& rows, std::size_t level) {
    Words& lo = scratch_[2 * level];
    Words& hi = scratch_[2 * level + 1];
    const Words& col = pr_.column[static_cast<std::size_t>(feature)];
    for (std::size_t w = 0; w < rows.size(); ++w) {
      lo[w] = rows[w] & ~col[w];
      hi[w] = rows[w] & col[w];
    }
    Cost a = left < 0 ? leaf(lo) : subtree(nodes, left, lo, level + 1);
    if (!a.feasible) return a;
    Cost b = right < 0 ? leaf(hi) : subtree(nodes, right, hi, level + 1);
    return a + b;
  }

 private:
  const Problem& pr_;
  std::vector<Words> scratch_;
};

// Mutable tree used during search. Nodes are pooled; detached nodes are left
// as garbage and dropped when the result is exported.
struct SearchTree {
  std::vector<SNode> nodes{SNode{}};
  std::vector<int> parent{-1};
  std::vector<int> depth{0};
  std::vector<int> preorder;

  void refresh() {
    parent.assign(nodes.size(), -2);
    depth.assign(nodes.size(), 0);
    preorder.clear();
    std::vector<int> stack{0};
    parent[0] = -1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      preorder.push_back(v);
      const SNode& node = nodes[static_cast<std::size_t>(v)];
      if (node.feature < 0) continue;
      for (int c : {node.right, node.left}) {
        parent[static_cast<std::size_t>(c)] = v;
        depth[static_cast<std::size_t>(c)] = depth[static_cast<std::size_t>(v)] + 1;
        stack.push_back(c);
      }
    }
  }

  bool reachable(int v) const { return parent[static_cast<std::size_t>(v)] != -2; }

  int add_leaf() {
    nodes.push_back(SNode{});
    parent.push_back(-2);
    depth.push_back(0);
    return static_cast<int>(nodes.size()) - 1;
  }

  std::vector<int> split_sequence() const {
    std::vector<int> seq;
    for (int v : preorder) {
      const int f = nodes[static_cast<std::size_t>(v)].feature;
      if (f >= 0) seq.push_back(f);
    }
    return seq;
  }

  std::int64_t height(int v) const {
    const SNode& node = nodes[static_cast<std::size_t>(v)];
    if (node.feature < 0) return 0;
    return 1 + std::max(height(node.left), height(node.right));
  }
};

// Rows reaching v, and a mask of features already used above v.
void path_of(const Problem& pr, const SearchTree& t, int v, Words& rows,
             std::vector<bool>& used) {
  rows = pr.all;
  used.assign(pr.p, false);
  int child = v;
  int up = t.parent[static_cast<std::size_t>(v)];
  while (up >= 0) {
    const SNode& node = t.nodes[static_cast<std::size_t>(up)];
    const Words& col = pr.column[static_cast<std::size_t>(node.feature)];
    const bool right = node.right == child;
    for (std::size_t w = 0; w < rows.size(); ++w) {
      rows[w] &= right ? col[w] : ~col[w];
    }
    used[static_cast<std::size_t>(node.feature)] = true;
    child = up;
    up = t.parent[static_cast<std::size_t>(up)];
  }
}

void random_grow(const Problem& pr, Rng& rng, SearchTree& t, int v, const Words& rows,
                 std::vector<bool>& used, std::size_t depth) {
  if (depth >= pr.max_depth || !rng.bernoulli(kInitialSplitProbability)) return;
  std::vector<int> order(pr.p);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<int>(order));
  const auto min_leaf = static_cast<std::int64_t>(pr.min_leaf);
  Words lo(pr.words);
  Words hi(pr.words);
  for (int f : order) {
    if (used[static_cast<std::size_t>(f)]) continue;
    const Words& col = pr.column[static_cast<std::size_t>(f)];
    for (std::size_t w = 0; w < pr.words; ++w) {
      lo[w] = rows[w] & ~col[w];
      hi[w] = rows[w] & col[w];
    }
    if (popcount(lo) < min_leaf || popcount(hi) < min_leaf) continue;
    const int left = t.add_leaf();
    const int right = t.add_leaf();
    SNode& node = t.nodes[static_cast<std::size_t>(v)];
    node.feature = f;
    node.left = left;
    node.right = right;
    used[static_cast<std::size_t>(f)] = true;
    random_grow(pr, rng, t, left, lo, used, depth + 1);
    random_grow(pr, rng, t, right, hi, used, depth + 1);
    used[static_cast<std::size_t>(f)] = false;
    return;
  }
}

enum class MoveKind { kLeaf, kRefeature, kPromoteLeft, kPromoteRight, kGrow };

struct Move {
  MoveKind kind = MoveKind::kLeaf;
  int feature = -1;
  double value = std::numeric_limits<double>::infinity();
};

struct RestartResult {
  SearchTree tree;
  Cost cost;
  std::vector<double> trace;
};

class LocalSearch {
 public:
  LocalSearch(const Problem& pr, std::uint64_t seed) : pr_(pr), eval_(pr), rng_(seed) {}

  RestartResult run() {
    RestartResult out;
    SearchTree& t = out.tree;
    std::vector<bool> used(pr_.p, false);
    random_grow(pr_, rng_, t, 0, pr_.all, used, 0);
    t.refresh();
    Cost total = eval_.subtree(t.nodes, 0, pr_.all, 0);
    out.trace.push_back(value(total, pr_));

    for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
      bool changed = false;
      std::vector<int> order = t.preorder;
      rng_.shuffle(std::span<int>(order));
      for (int v : order) {
        if (!t.reachable(v)) continue;
        if (improve_at(t, v)) {
          t.refresh();
          total = eval_.subtree(t.nodes, 0, pr_.all, 0);
          out.trace.push_back(value(total, pr_));
          changed = true;
        }
      }
      if (!changed) break;
    }
    out.cost = total;
    canonicalize(out);
    return out;
  }

 private:
  bool improve_at(SearchTree& t, int v) {
    Words rows;
    std::vector<bool> used;
    path_of(pr_, t, v, rows, used);
    const SNode node = t.nodes[static_cast<std::size_t>(v)];
    const std::size_t depth = static_cast<std::size_t>(t.depth[static_cast<std::size_t>(v)]);
    const double current = value(eval_.subtree(t.nodes, v, rows, 0), pr_);

    Move best;
    auto offer = [&](MoveKind kind, int feature, const Cost& c) {
      const double val = value(c, pr_);
      if (val < best.value) best = {kind, feature, val};
    };

    if (node.feature >= 0) {
      offer(MoveKind::kLeaf, -1, eval_.leaf(rows));
      for (std::size_t f = 0; f < pr_.p; ++f) {
        if (used[f] || static_cast<int>(f) == node.feature) continue;
        offer(MoveKind::kRefeature, static_cast<int>(f),
              eval_.split(t.nodes, static_cast<int>(f), node.left, node.right, rows, 0));
      }
      offer(MoveKind::kPromoteLeft, -1, eval_.subtree(t.nodes, node.left, rows, 0));
      offer(MoveKind::kPromoteRight, -1, eval_.subtree(t.nodes, node.right, rows, 0));
    } else if (depth < pr_.max_depth) {
      for (std::size_t f = 0; f < pr_.p; ++f) {
        if (used[f]) continue;
        offer(MoveKind::kGrow, static_cast<int>(f),
              eval_.split(t.nodes, static_cast<int>(f), -1, -1, rows, 0));
      }
    }
    if (!(best.value < current - kImprovement)) return false;

    SNode& target = t.nodes[static_cast<std::size_t>(v)];
    switch (best.kind) {
      case MoveKind::kLeaf:
        target = SNode{};
        break;
      case MoveKind::kRefeature:
        target.feature = best.feature;
        break;
      case MoveKind::kPromoteLeft:
        target = t.nodes[static_cast<std::size_t>(node.left)];
        break;
      case MoveKind::kPromoteRight:
        target = t.nodes[static_cast<std::size_t>(node.right)];
        break;
      case MoveKind::kGrow: {
        const int left = t.add_leaf();
        const int right = t.add_leaf();
        SNode& grown = t.nodes[static_cast<std::size_t>(v)];
        grown.feature = best.feature;
        grown.left = left;
        grown.right = right;
        break;
      }
    }
    return true;
  }

  // Equal-cost parent/child feature exchanges that make the preorder split
  // sequence lexicographically smaller. Runs after the descent so its trace
  // stays strictly decreasing.
  void canonicalize(RestartResult& r) {
    SearchTree& t = r.tree;
    bool changed = true;
    while (changed) {
      changed = false;
      const std::vector<int> before = t.split_sequence();
      for (int v : t.preorder) {
        SNode& parent = t.nodes[static_cast<std::size_t>(v)];
        if (parent.feature < 0) continue;
        for (int c : {parent.left, parent.right}) {
          SNode& child = t.nodes[static_cast<std::size_t>(c)];
          if (child.feature < 0) continue;
          std::swap(parent.feature, child.feature);
          t.refresh();
          const Cost cost = eval_.subtree(t.nodes, 0, pr_.all, 0);
          if (cost.feasible && cost.misclassified == r.cost.misclassified &&
              cost.leaves == r.cost.leaves && t.split_sequence() < before) {
            changed = true;
            break;
          }
          std::swap(parent.feature, child.feature);
          t.refresh();
        }
        if (changed) break;
      }
    }
  }

  const Problem& pr_;
  Evaluator eval_;
  Rng rng_;
};

bool better_result(const RestartResult& a, const RestartResult& b, const Problem& pr) {
  const double va = value(a.cost, pr);
  const double vb = value(b.cost, pr);
  if (va < vb - kImprovement) return true;
  if (vb < va - kImprovement) return false;
  if (a.cost.leaves != b.cost.leaves) return a.cost.leaves < b.cost.leaves;
  return a.tree.split_sequence() < b.tree.split_sequence();
}

void export_node(const Problem& pr, const SearchTree& t, int v, const Words& rows,
                 Tree& out) {
  const int id = static_cast<int>(out.nodes.size());
  out.nodes.emplace_back();
  TreeNode node;
  node.n = popcount(rows);
  node.n_struck = popcount_and(rows, pr.labels);
  node.p_strike = node.n > 0 ? static_cast<double>(node.n_struck) / static_cast<double>(node.n)
                             : 0.0;
  const SNode& s = t.nodes[static_cast<std::size_t>(v)];
  if (s.feature >= 0) {
    node.feature = s.feature;
    const Words& col = pr.column[static_cast<std::size_t>(s.feature)];
    Words lo(rows.size());
    Words hi(rows.size());
    for (std::size_t w = 0; w < rows.size(); ++w) {
      lo[w] = rows[w] & ~col[w];
      hi[w] = rows[w] & col[w];
    }
    node.left = static_cast<int>(out.nodes.size());
    export_node(pr, t, s.left, lo, out);
    node.right = static_cast<int>(out.nodes.size());
    export_node(pr, t, s.right, hi, out);
  }
  out.nodes[static_cast<std::size_t>(id)] = node;
}

bool find_path(const Tree& tree, int v, int target, std::vector<PathCondition>& path) {
  if (v == target) return true;
  const TreeNode& node = tree.nodes[static_cast<std::size_t>(v)];
  if (node.is_leaf()) return false;
  const std::string& name = tree.feature_names[static_cast<std::size_t>(node.feature)];
  path.push_back({name, false});
  if (find_path(tree, node.left, target, path)) return true;
  path.back().value = true;
  if (find_path(tree, node.right, target, path)) return true;
  path.pop_back();
  return false;
}

std::string format_prob(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", p);
  return buf;
}

void render_node(const Tree& tree, int v, int indent, std::ostringstream& out) {
  const TreeNode& node = tree.nodes[static_cast<std::size_t>(v)];
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (node.is_leaf()) {
    out << pad << "[" << v << "] leaf n=" << node.n << " struck=" << node.n_struck
        << " p_strike=" << format_prob(node.p_strike) << '\n';
    return;
  }
  const std::string& name = tree.feature_names[static_cast<std::size_t>(node.feature)];
  out << pad << "[" << v << "] split on " << name << " n=" << node.n
      << " p_strike=" << format_prob(node.p_strike) << '\n';
  out << pad << "  " << name << " = no:\n";
  render_node(tree, node.left, indent + 2, out);
  out << pad << "  " << name << " = yes:\n";
  render_node(tree, node.right, indent + 2, out);
}

}  // namespace

std::size_t Tree::depth() const {
  std::size_t deepest = 0;
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  while (!stack.empty() && !nodes.empty()) {
    auto [v, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const TreeNode& node = nodes[static_cast<std::size_t>(v)];
    if (!node.is_leaf()) {
      stack.push_back({node.left, d + 1});
      stack.push_back({node.right, d + 1});
    }
  }
  return deepest;
}

std::vector<int> Tree::leaves() const {
  std::vector<int> out;
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    if (nodes[v].is_leaf()) out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<int> Tree::split_sequence() const {
  std::vector<int> out;
  for (const TreeNode& node : nodes) {
    if (!node.is_leaf()) out.push_back(node.feature);
  }
  return out;
}

double tree_objective(const Tree& tree, const FeatureMatrix& m, double alpha,
                      std::size_t min_leaf) {
  std::vector<std::int64_t> count(tree.nodes.size(), 0);
  std::vector<std::int64_t> struck(tree.nodes.size(), 0);
  std::vector<double> row(m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      row[j] = m.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    const int leaf = predict_leaf(tree, row).leaf;
    ++count[static_cast<std::size_t>(leaf)];
    if (m.y(static_cast<Eigen::Index>(i)) != 0.0) ++struck[static_cast<std::size_t>(leaf)];
  }
  std::int64_t misclassified = 0;
  const std::vector<int> leaves = tree.leaves();
  for (int leaf : leaves) {
    const auto l = static_cast<std::size_t>(leaf);
    if (count[l] < static_cast<std::int64_t>(min_leaf)) {
      return std::numeric_limits<double>::infinity();
    }
    misclassified += std::min(struck[l], count[l] - struck[l]);
  }
  return static_cast<double>(misclassified) / static_cast<double>(m.rows()) +
         alpha * static_cast<double>(leaves.size());
}

Tree fit_tree(const FeatureMatrix& m, const TreeSettings& settings, TreeSearchLog* log) {
  if (!m.race_columns.empty()) {
    throw ContractViolation("tree training data must exclude race columns (found '" +
                            m.columns[m.race_columns.front()] + "')");
  }
  if (settings.max_depth < 1) throw ArgumentError("max_depth must be at least 1");
  if (settings.min_leaf < 1) throw ArgumentError("min_leaf must be at least 1");
  if (!(settings.alpha >= 0.0)) throw ArgumentError("alpha must be non-negative");
  if (settings.restarts < 1) throw ArgumentError("need at least one restart");
  if (m.rows() < 2 * settings.min_leaf) {
    throw DegenerateDataError("tree needs at least " + std::to_string(2 * settings.min_leaf) +
                              " rows, got " + std::to_string(m.rows()));
  }

  const Problem pr(m, settings);
  std::vector<RestartResult> results(settings.restarts);
  parallel_for(settings.restarts, settings.threads, [&](std::size_t r) {
    LocalSearch search(pr, derive_seed(settings.seed, r));
    results[r] = search.run();
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r) {
    if (better_result(results[r], results[best], pr)) best = r;
  }
  if (log != nullptr) {
    log->restart_traces.clear();
    for (RestartResult& r : results) log->restart_traces.push_back(std::move(r.trace));
    log->best_objective = value(results[best].cost, pr);
  }

  Tree tree;
  tree.feature_names = m.columns;
  export_node(pr, results[best].tree, 0, pr.all, tree);
  return tree;
}

AlphaTuning tune_alpha(const FeatureMatrix& train, std::span<const double> alpha_grid,
                       std::size_t folds, std::uint64_t seed, const TreeSettings& settings) {
  if (alpha_grid.empty()) throw ArgumentError("alpha grid is empty");
  const std::vector<std::size_t> assignment = stratified_folds(
      std::span<const double>(train.y.data(), train.rows()), folds, seed);

  std::vector<FeatureMatrix> fit_rows;
  std::vector<FeatureMatrix> held_out;
  for (std::size_t f = 0; f < folds; ++f) {
    fit_rows.push_back(train.select_rows(fold_rows(assignment, f, false)));
    held_out.push_back(train.select_rows(fold_rows(assignment, f, true)));
  }

  AlphaTuning out;
  std::size_t chosen = 0;
  std::vector<double> row(train.cols());
  for (std::size_t a = 0; a < alpha_grid.size(); ++a) {
    TreeSettings s = settings;
    s.alpha = alpha_grid[a];
    double error_sum = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
      const Tree tree = fit_tree(fit_rows[f], s);
      const FeatureMatrix& val = held_out[f];
      std::size_t wrong = 0;
      for (std::size_t i = 0; i < val.rows(); ++i) {
        for (std::size_t j = 0; j < val.cols(); ++j) {
          row[j] = val.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        const TreeNode& leaf =
            tree.nodes[static_cast<std::size_t>(predict_leaf(tree, row).leaf)];
        if (leaf_label(leaf) != static_cast<int>(val.y(static_cast<Eigen::Index>(i)))) {
          ++wrong;
        }
      }
      error_sum += static_cast<double>(wrong) / static_cast<double>(val.rows());
    }
    out.cv_error.push_back(error_sum / static_cast<double>(folds));
    if (a == 0) continue;
    const double err = out.cv_error[a];
    const double best = out.cv_error[chosen];
    if (err < best - kImprovement ||
        (std::abs(err - best) <= kImprovement && alpha_grid[a] > alpha_grid[chosen])) {
      chosen = a;
    }
  }
  out.alpha = alpha_grid[chosen];
  TreeSettings s = settings;
  s.alpha = out.alpha;
  out.tree = fit_tree(train, s);
  return out;
}

LeafPrediction predict_leaf(const Tree& tree, std::span<const double> row) {
  int v = 0;
  for (;;) {
    const TreeNode& node = tree.nodes.at(static_cast<std::size_t>(v));
    if (node.is_leaf()) return {v, node.p_strike};
    const auto f = static_cast<std::size_t>(node.feature);
    if (f >= row.size()) throw ArgumentError("row has no value for split feature");
    v = row[f] != 0.0 ? node.right : node.left;
  }
}

std::vector<PathCondition> describe_path(const Tree& tree, int leaf) {
  if (leaf < 0 || static_cast<std::size_t>(leaf) >= tree.nodes.size() ||
      !tree.nodes[static_cast<std::size_t>(leaf)].is_leaf()) {
    throw ArgumentError("unknown leaf id " + std::to_string(leaf));
  }
  std::vector<PathCondition> path;
  find_path(tree, 0, leaf, path);
  return path;
}

std::string render_rules(const Tree& tree) {
  std::ostringstream out;
  if (!tree.nodes.empty()) render_node(tree, 0, 0, out);
  return out.str();
}

std::string render_dot(const Tree& tree) {
  std::ostringstream out;
  out << "digraph tree {\n  node [shape=box];\n";
  for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
    const TreeNode& node = tree.nodes[v];
    out << "  n" << v << " [label=\"";
    if (node.is_leaf()) {
      out << "leaf " << v << "\\nn=" << node.n << "\\np_strike=" << format_prob(node.p_strike)
          << "\", shape=ellipse];\n";
    } else {
      out << tree.feature_names[static_cast<std::size_t>(node.feature)] << "\\nn=" << node.n
          << "\"];\n";
    }
  }
  for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
    const TreeNode& node = tree.nodes[v];
    if (node.is_leaf()) continue;
    out << "  n" << v << " -> n" << node.left << " [label=\"no\"];\n";
    out << "  n" << v << " -> n" << node.right << " [label=\"yes\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace strikeaudit
