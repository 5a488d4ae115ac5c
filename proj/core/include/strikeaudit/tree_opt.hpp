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

#ifndef STRIKEAUDIT_TREE_OPT_HPP_
#define STRIKEAUDIT_TREE_OPT_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "strikeaudit/dataset.hpp"

namespace strikeaudit {

// Internal nodes send feature value 0 left and 1 right. Every node carries
// the training rows that reached it.
struct TreeNode {
  int feature = -1;  // column index into Tree::feature_names; -1 for leaves
  int left = -1;
  int right = -1;
  std::int64_t n = 0;
  std::int64_t n_struck = 0;
  double p_strike = 0.0;  // n_struck / n

  bool is_leaf() const { return feature < 0; }
};

// Nodes are numbered in preorder (left subtree first); the root is node 0.
struct Tree {
  std::vector<TreeNode> nodes;
  std::vector<std::string> feature_names;

  std::size_t depth() const;
  std::vector<int> leaves() const;  // preorder
  std::size_t leaf_count() const { return leaves().size(); }
  // Split features of internal nodes in preorder.
  std::vector<int> split_sequence() const;
};

struct TreeSettings {
  std::size_t max_depth = 4;
  double alpha = 0.01;  // penalty per leaf
  std::size_t min_leaf = 10;
  std::size_t restarts = 100;
  std::uint64_t seed = 0;
  int threads = 1;
};

// Optional record of the search, for inspection and testing.
struct TreeSearchLog {
  // Objective after the random start and after each accepted move.
  std::vector<std::vector<double>> restart_traces;
  double best_objective = 0.0;
};

// (misclassified rows under per-leaf majority) / n + alpha * leaves,
// recomputed from `m`. Infinite when a leaf holds fewer than min_leaf rows.
double tree_objective(const Tree& tree, const FeatureMatrix& m, double alpha,
                      std::size_t min_leaf = 1);

// Trains a depth-limited tree by minimizing tree_objective with local search
// from random restarts. At each node a sweep tries re-splitting on another
// feature, collapsing to a leaf, promoting a child subtree, or splitting a
// leaf, and accepts strict improvements until a sweep changes nothing. Among
// equal objectives the result has the fewest leaves, then the
// lexicographically smallest preorder split sequence. Deterministic given
// settings.seed, independent of settings.threads.
//
// Throws ContractViolation if `m` still has race columns and
// DegenerateDataError when m has fewer than 2 * min_leaf rows.
Tree fit_tree(const FeatureMatrix& m, const TreeSettings& settings,
              TreeSearchLog* log = nullptr);

struct AlphaTuning {
  double alpha = 0.0;
  Tree tree;  // refit on all training rows at `alpha`
  std::vector<double> cv_error;  // mean held-out misclassification per grid value
};

// Picks the grid value with the lowest stratified k-fold misclassification,
// ties to the larger alpha, and refits.
AlphaTuning tune_alpha(const FeatureMatrix& train, std::span<const double> alpha_grid,
                       std::size_t folds, std::uint64_t seed, const TreeSettings& settings);

struct LeafPrediction {
  int leaf = -1;
  double p_strike = 0.0;
};

// Routes a row whose entries align with tree.feature_names.
LeafPrediction predict_leaf(const Tree& tree, std::span<const double> row);

// Majority label of a leaf: 1 when more than half its rows were struck.
inline int leaf_label(const TreeNode& leaf) { return 2 * leaf.n_struck > leaf.n ? 1 : 0; }

struct PathCondition {
  std::string feature;
  bool value = false;

  std::string to_string() const { return feature + (value ? " = yes" : " = no"); }
  friend bool operator==(const PathCondition&, const PathCondition&) = default;
};

// Root-to-leaf conditions. Throws ArgumentError unless `leaf` is a leaf id.
std::vector<PathCondition> describe_path(const Tree& tree, int leaf);

// Indented rule listing, one line per node.
std::string render_rules(const Tree& tree);
// Graphviz DOT node/edge description.
std::string render_dot(const Tree& tree);

}  // namespace strikeaudit

#endif  // STRIKEAUDIT_TREE_OPT_HPP_
