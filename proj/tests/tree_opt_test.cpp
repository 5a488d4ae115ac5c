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
#include <cmath>
#include <functional>
#include <set>

#include <gtest/gtest.h>

#include "designs.hpp"
#include "oracles.hpp"
#include "strikeaudit/errors.hpp"
#include "strikeaudit/random.hpp"

namespace strikeaudit {
namespace {

// Binary columns with independent Bernoulli(0.5) entries and labels from a
// caller-supplied rate function.
FeatureMatrix generated(std::size_t n, std::size_t p, std::uint64_t seed,
                        const std::function<double(const Eigen::VectorXd&)>& rate) {
  Rng rng(seed);
  FeatureMatrix m;
  m.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  m.y.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < m.x.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.x.cols(); ++j) m.x(i, j) = rng.bernoulli(0.5) ? 1.0 : 0.0;
    m.y(i) = rng.bernoulli(rate(m.x.row(i).transpose())) ? 1.0 : 0.0;
  }
  for (std::size_t j = 0; j < p; ++j) m.columns.push_back("f" + std::to_string(j));
  return m;
}

Tree chain_tree() {
  Tree t;
  t.feature_names = {"accused", "know_def", "fam_accused", "death_hesitation"};
  auto leaf = [](std::int64_t n, std::int64_t s) {
    TreeNode node;
    node.n = n;
    node.n_struck = s;
    node.p_strike = double(s) / double(n);
    return node;
  };
  t.nodes = {TreeNode{0, 1, 8}, TreeNode{1, 2, 7}, TreeNode{2, 3, 6}, TreeNode{3, 4, 5},
             leaf(100, 17),     leaf(50, 50),      leaf(100, 56),     leaf(100, 65),
             leaf(100, 93)};
  return t;
}

void expect_valid(const Tree& tree, const FeatureMatrix& m, const TreeSettings& s) {
  EXPECT_LE(tree.depth(), s.max_depth);
  std::int64_t total = 0;
  for (int leaf : tree.leaves()) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(leaf)];
    EXPECT_GE(node.n, static_cast<std::int64_t>(s.min_leaf));
    total += node.n;
    const auto path = describe_path(tree, leaf);
    std::set<std::string> used;
    for (const auto& c : path) EXPECT_TRUE(used.insert(c.feature).second);
  }
  EXPECT_EQ(total, static_cast<std::int64_t>(m.rows()));
  // Stored counts are the empirical counts of the rows routed to each node.
  std::vector<std::int64_t> n(tree.nodes.size(), 0), struck(tree.nodes.size(), 0);
  std::vector<double> row(m.cols());
  for (Eigen::Index i = 0; i < m.x.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) row[j] = m.x(i, static_cast<Eigen::Index>(j));
    const auto leaf = static_cast<std::size_t>(predict_leaf(tree, row).leaf);
    ++n[leaf];
    struck[leaf] += m.y(i) == 1.0;
  }
  for (int leaf : tree.leaves()) {
    const auto l = static_cast<std::size_t>(leaf);
    EXPECT_EQ(tree.nodes[l].n, n[l]);
    EXPECT_EQ(tree.nodes[l].n_struck, struck[l]);
    EXPECT_EQ(tree.nodes[l].p_strike, double(struck[l]) / double(n[l]));
  }
}

TEST(FitTree, HugePenaltyGivesSingleLeaf) {
  const FeatureMatrix m = generated(500, 4, 1, [](const Eigen::VectorXd& x) {
    return x(0) == 1.0 ? 0.9 : 0.3;
  });
  TreeSettings s;
  s.alpha = 1.0;
  s.restarts = 10;
  const Tree tree = fit_tree(m, s);
  ASSERT_EQ(tree.nodes.size(), 1U);
  EXPECT_EQ(leaf_label(tree.nodes[0]), m.y.mean() > 0.5 ? 1 : 0);
}

TEST(FitTree, RecoversDepthOneSplit) {
  const FeatureMatrix m = generated(2000, 5, 2, [](const Eigen::VectorXd& x) {
    return x(2) == 1.0 ? 0.9 : 0.2;
  });
  TreeSettings s;
  s.alpha = 0.01;
  s.restarts = 20;
  const Tree tree = fit_tree(m, s);
  ASSERT_EQ(tree.nodes.size(), 3U);
  EXPECT_EQ(tree.nodes[0].feature, 2);
  s.max_depth = 1;
  const Tree shallow = fit_tree(m, s);
  EXPECT_EQ(oracle::tree_value(shallow, m, s.alpha, s.min_leaf),
            oracle::exhaustive_tree(m, s.alpha, s.min_leaf, 1));
}

TEST(FitTree, MatchesExhaustiveDepthTwo) {
  Rng rng(3);
  for (int inst = 0; inst < 15; ++inst) {
    const std::size_t p = 2 + rng.below(5);
    const int a = static_cast<int>(rng.below(p));
    const int b = static_cast<int>(rng.below(p));
    const double base = 0.2 + 0.6 * rng.uniform();
    const FeatureMatrix m =
        generated(100 + rng.below(300), p, 100 + inst, [&](const Eigen::VectorXd& x) {
          return x(a) == 1.0 ? (x(b) == 1.0 ? 0.85 : 0.35) : base;
        });
    TreeSettings s;
    s.max_depth = 1 + rng.below(2);
    s.alpha = 0.002 + 0.02 * rng.uniform();
    s.min_leaf = 1 + rng.below(15);
    s.restarts = 30;
    s.seed = static_cast<std::uint64_t>(inst);
    const Tree tree = fit_tree(m, s);
    EXPECT_EQ(oracle::tree_value(tree, m, s.alpha, s.min_leaf),
              oracle::exhaustive_tree(m, s.alpha, s.min_leaf, s.max_depth))
        << "instance " << inst;
    expect_valid(tree, m, s);
  }
}

TEST(FitTree, TracesStrictlyDecreaseAndBestIsMinimum) {
  const FeatureMatrix m = generated(800, 6, 4, [](const Eigen::VectorXd& x) {
    return x(0) + x(1) + x(2) >= 2 ? 0.8 : 0.25;
  });
  TreeSettings s;
  s.restarts = 25;
  s.alpha = 0.005;
  TreeSearchLog log;
  const Tree tree = fit_tree(m, s, &log);
  ASSERT_EQ(log.restart_traces.size(), 25U);
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& trace : log.restart_traces) {
    ASSERT_FALSE(trace.empty());
    for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LT(trace[i], trace[i - 1]);
    lowest = std::min(lowest, *std::min_element(trace.begin(), trace.end()));
  }
  EXPECT_LE(log.best_objective, lowest);
  EXPECT_NEAR(tree_objective(tree, m, s.alpha, s.min_leaf), log.best_objective, 1e-12);
  EXPECT_EQ(tree_objective(tree, m, s.alpha, s.min_leaf),
            oracle::tree_value(tree, m, s.alpha, s.min_leaf));
  expect_valid(tree, m, s);
}

TEST(FitTree, DeterministicAndThreadIndependent) {
  const FeatureMatrix m = generated(600, 6, 5, [](const Eigen::VectorXd& x) {
    return x(3) == 1.0 ? (x(4) == 1.0 ? 0.9 : 0.5) : 0.2;
  });
  TreeSettings s;
  s.restarts = 16;
  s.seed = 9;
  const Tree a = fit_tree(m, s);
  s.threads = 3;
  const Tree b = fit_tree(m, s);
  EXPECT_EQ(a.split_sequence(), b.split_sequence());
  ASSERT_EQ(a.nodes.size(), b.nodes.size());
  for (std::size_t v = 0; v < a.nodes.size(); ++v) {
    EXPECT_EQ(a.nodes[v].left, b.nodes[v].left);
    EXPECT_EQ(a.nodes[v].n, b.nodes[v].n);
  }
}

TEST(FitTree, Contracts) {
  FeatureMatrix m = generated(100, 3, 6, [](const Eigen::VectorXd&) { return 0.5; });
  m.race_columns = {1};
  m.columns[1] = "is_black";
  EXPECT_THROW(fit_tree(m, TreeSettings{}), ContractViolation);
  const FeatureMatrix small = generated(19, 3, 6, [](const Eigen::VectorXd&) { return 0.5; });
  EXPECT_THROW(fit_tree(small, TreeSettings{}), DegenerateDataError);
  TreeSettings bad;
  bad.max_depth = 0;
  EXPECT_THROW(fit_tree(generated(100, 3, 6, [](const Eigen::VectorXd&) { return 0.5; }), bad),
               ArgumentError);
}

TEST(TuneAlpha, SingleValueGrid) {
  const FeatureMatrix m = generated(300, 4, 7, [](const Eigen::VectorXd& x) {
    return x(0) == 1.0 ? 0.8 : 0.3;
  });
  TreeSettings s;
  s.restarts = 5;
  const std::vector<double> grid = {0.02};
  const AlphaTuning t = tune_alpha(m, grid, 5, 1, s);
  EXPECT_EQ(t.alpha, 0.02);
  EXPECT_EQ(t.cv_error.size(), 1U);
  EXPECT_THROW(tune_alpha(m, std::vector<double>{}, 5, 1, s), ArgumentError);
}

TEST(TuneAlpha, PureNoisePrefersSingleLeaf) {
  const std::vector<double> grid = {0.001, 0.01, 0.05};
  int single = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const FeatureMatrix m =
        generated(400, 5, 700 + seed, [](const Eigen::VectorXd&) { return 0.4; });
    TreeSettings s;
    s.restarts = 8;
    const AlphaTuning t = tune_alpha(m, grid, 5, seed, s);
    if (t.tree.nodes.size() == 1 && t.alpha == grid.back()) ++single;
  }
  EXPECT_GE(single, 18);
}

TEST(TuneAlpha, PlantedSignalPrefersSmallPenalty) {
  const std::vector<double> grid = {0.001, 0.01, 0.5};
  int small = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const FeatureMatrix m = generated(600, 5, 800 + seed, [](const Eigen::VectorXd& x) {
      return x(0) == 1.0 ? (x(1) == 1.0 ? 0.9 : 0.3) : (x(2) == 1.0 ? 0.75 : 0.1);
    });
    TreeSettings s;
    s.restarts = 8;
    if (tune_alpha(m, grid, 5, seed, s).alpha <= 0.01) ++small;
  }
  EXPECT_GE(small, 18);
}

TEST(PredictLeaf, SingleLeafTree) {
  Tree t;
  t.feature_names = {"a"};
  t.nodes = {TreeNode{}};
  t.nodes[0].p_strike = 0.4;
  const LeafPrediction p = predict_leaf(t, std::vector<double>{1.0});
  EXPECT_EQ(p.leaf, 0);
  EXPECT_EQ(p.p_strike, 0.4);
}

TEST(PredictLeaf, ChainTree) {
  const Tree t = chain_tree();
  const LeafPrediction accused = predict_leaf(t, std::vector<double>{1, 0, 0, 0});
  EXPECT_EQ(accused.leaf, 8);
  EXPECT_DOUBLE_EQ(accused.p_strike, 0.93);
  const LeafPrediction none = predict_leaf(t, std::vector<double>{0, 0, 0, 0});
  EXPECT_EQ(none.leaf, 4);
  EXPECT_DOUBLE_EQ(none.p_strike, 0.17);
}

TEST(DescribePath, Cases) {
  Tree root;
  root.nodes = {TreeNode{}};
  EXPECT_TRUE(describe_path(root, 0).empty());

  const Tree t = chain_tree();
  const auto node4 = describe_path(t, 7);
  ASSERT_EQ(node4.size(), 2U);
  EXPECT_EQ(node4[0].to_string(), "accused = no");
  EXPECT_EQ(node4[1].to_string(), "know_def = yes");

  const auto node8 = describe_path(t, 5);
  ASSERT_EQ(node8.size(), 4U);
  EXPECT_EQ(node8.back().to_string(), "death_hesitation = yes");

  EXPECT_THROW(describe_path(t, 0), ArgumentError);
  EXPECT_THROW(describe_path(t, 9), ArgumentError);
  EXPECT_THROW(describe_path(t, -1), ArgumentError);
}

TEST(Render, RulesAndDot) {
  const Tree t = chain_tree();
  const std::string rules = render_rules(t);
  EXPECT_NE(rules.find("split on accused"), std::string::npos);
  EXPECT_NE(rules.find("know_def = yes:"), std::string::npos);
  EXPECT_NE(rules.find("[8] leaf n=100 struck=93 p_strike=0.9300"), std::string::npos);
  const std::string dot = render_dot(t);
  EXPECT_EQ(dot.rfind("digraph tree {", 0), 0U);
  EXPECT_NE(dot.find("n0 -> n8 [label=\"yes\"]"), std::string::npos);
  EXPECT_NE(dot.find("n0 -> n1 [label=\"no\"]"), std::string::npos);
}

TEST(TreeObjective, InfeasibleLeafIsInfinite) {
  const FeatureMatrix m = generated(50, 4, 8, [](const Eigen::VectorXd&) { return 0.5; });
  Tree t = chain_tree();
  EXPECT_TRUE(std::isinf(tree_objective(t, m, 0.01, 40)));
  EXPECT_TRUE(std::isfinite(tree_objective(t, m, 0.01, 0)));
}

}  // namespace
}  // namespace strikeaudit
