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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace strikeaudit::oracle {
namespace {

using i128 = __int128;

i128 binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  i128 r = 1;
  for (std::int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;  // exact at every step
  return r;
}

}  // namespace

std::optional<double> fisher(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  const std::int64_t r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
  if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0) return std::nullopt;
  const i128 observed = binomial(r1, a) * binomial(r2, c);
  i128 total = 0;
  i128 tail = 0;
  for (std::int64_t x = std::max<std::int64_t>(0, c1 - r2); x <= std::min(r1, c1); ++x) {
    const i128 num = binomial(r1, x) * binomial(r2, c1 - x);
    total += num;
    // num <= observed * (1 + 1e-7), kept in integers
    if (num * 10'000'000 <= observed * 10'000'001) tail += num;
  }
  return static_cast<double>(static_cast<long double>(tail) / static_cast<long double>(total));
}

double pairwise_auc(const std::vector<double>& scores, const std::vector<double>& labels) {
  std::int64_t doubled = 0;
  std::int64_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1.0) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0.0) continue;
      ++pairs;
      if (scores[i] > scores[j]) {
        doubled += 2;
      } else if (scores[i] == scores[j]) {
        doubled += 1;
      }
    }
  }
  return static_cast<double>(doubled) / static_cast<double>(2 * pairs);
}

double naive_nll(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                 const std::vector<std::size_t>& support, double intercept,
                 const Eigen::VectorXd& beta, double ridge) {
  long double total = 0.0L;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    long double eta = intercept;
    for (std::size_t s = 0; s < support.size(); ++s) {
      eta += static_cast<long double>(beta(static_cast<Eigen::Index>(s))) *
             x(i, static_cast<Eigen::Index>(support[s]));
    }
    total += std::log(1.0L + std::exp(eta)) - y(i) * eta;
  }
  long double norm = 0.0L;
  for (Eigen::Index s = 0; s < beta.size(); ++s) norm += beta(s) * beta(s);
  return static_cast<double>(total + 0.5L * ridge * norm);
}

Eigen::VectorXd naive_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               const std::vector<std::size_t>& support, double intercept,
                               const Eigen::VectorXd& beta, double ridge) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(support.size()) + 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double eta = intercept;
    for (std::size_t s = 0; s < support.size(); ++s) {
      eta += beta(static_cast<Eigen::Index>(s)) * x(i, static_cast<Eigen::Index>(support[s]));
    }
    const double residual = 1.0 / (1.0 + std::exp(-eta)) - y(i);
    g(0) += residual;
    for (std::size_t s = 0; s < support.size(); ++s) {
      g(static_cast<Eigen::Index>(s) + 1) += residual * x(i, static_cast<Eigen::Index>(support[s]));
    }
  }
  for (Eigen::Index s = 0; s < beta.size(); ++s) g(s + 1) += ridge * beta(s);
  return g;
}

MinimizeResult bfgs(const std::function<double(const Eigen::VectorXd&)>& f,
                    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
                    Eigen::VectorXd x0, double gradient_tolerance, int max_iterations) {
  const Eigen::Index n = x0.size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);  // inverse Hessian estimate
  Eigen::VectorXd x = std::move(x0);
  double fx = f(x);
  Eigen::VectorXd g = grad(x);
  int it = 0;
  for (; it < max_iterations && g.lpNorm<Eigen::Infinity>() > gradient_tolerance; ++it) {
    Eigen::VectorXd dir = -h * g;
    if (dir.dot(g) >= 0.0) {
      h.setIdentity();
      dir = -g;
    }
    double step = 1.0;
    Eigen::VectorXd next = x + dir;
    double fnext = f(next);
    while (fnext > fx + 1e-4 * step * g.dot(dir) && step > 1e-20) {
      step *= 0.5;
      next = x + step * dir;
      fnext = f(next);
    }
    if (!(fnext <= fx)) break;
    const Eigen::VectorXd gnext = grad(next);
    const Eigen::VectorXd s = next - x;
    const Eigen::VectorXd yv = gnext - g;
    const double sy = s.dot(yv);
    if (sy > 1e-300) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(n, n);
      h = (i - rho * s * yv.transpose()) * h * (i - rho * yv * s.transpose()) +
          rho * s * s.transpose();
    }
    x = next;
    fx = fnext;
    g = gnext;
  }
  return {x, fx, it};
}

ExhaustiveSubset exhaustive_subset(const FeatureMatrix& m, std::size_t k,
                                   const FitSettings& settings) {
  const std::size_t p = m.cols();
  ExhaustiveSubset best;
  best.objective = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << p); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) > k) continue;
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < p; ++j) {
      if (mask >> j & 1U) support.push_back(j);
    }
    const LogisticModel model = fit(m, support, settings);
    const double value = nll(model, m);
    if (value < best.objective) best = {support, value};
  }
  return best;
}

double tree_value(const Tree& tree, const FeatureMatrix& m, double alpha,
                  std::size_t min_leaf) {
  std::vector<std::int64_t> rows(tree.nodes.size(), 0);
  std::vector<std::int64_t> positives(tree.nodes.size(), 0);
  for (Eigen::Index i = 0; i < m.x.rows(); ++i) {
    std::size_t v = 0;
    while (tree.nodes[v].feature >= 0) {
      v = static_cast<std::size_t>(m.x(i, tree.nodes[v].feature) == 1.0 ? tree.nodes[v].right
                                                                          : tree.nodes[v].left);
    }
    ++rows[v];
    if (m.y(i) == 1.0) ++positives[v];
  }
  std::int64_t wrong = 0;
  std::int64_t leaves = 0;
  for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
    if (tree.nodes[v].feature >= 0) continue;
    ++leaves;
    if (rows[v] < static_cast<std::int64_t>(min_leaf)) {
      return std::numeric_limits<double>::infinity();
    }
    wrong += std::min(positives[v], rows[v] - positives[v]);
  }
  return static_cast<double>(wrong) / static_cast<double>(m.rows()) +
         alpha * static_cast<double>(leaves);
}

double exhaustive_tree(const FeatureMatrix& m, double alpha, std::size_t min_leaf,
                       std::size_t max_depth) {
  const int p = static_cast<int>(m.cols());
  // Each candidate is described by a root feature and optional child
  // features (-1 = leaf); built as a Tree and scored with tree_value.
  auto build = [&](int root, int left, int right) {
    Tree t;
    t.feature_names = m.columns;
    if (root < 0) {
      t.nodes.push_back({});
      return t;
    }
    t.nodes.push_back({root, 1, -1});
    auto add_child = [&](int f) {
      const int id = static_cast<int>(t.nodes.size());
      if (f < 0) {
        t.nodes.push_back({});
      } else {
        t.nodes.push_back({f, id + 1, id + 2});
        t.nodes.push_back({});
        t.nodes.push_back({});
      }
      return id;
    };
    add_child(left);
    t.nodes[0].right = add_child(right);
    return t;
  };
  double best = tree_value(build(-1, -1, -1), m, alpha, min_leaf);
  if (max_depth == 0) return best;
  for (int r = 0; r < p; ++r) {
    for (int l = -1; l < p; ++l) {
      for (int q = -1; q < p; ++q) {
        if (max_depth < 2 && (l >= 0 || q >= 0)) continue;
        if (l == r || q == r) continue;
        best = std::min(best, tree_value(build(r, l, q), m, alpha, min_leaf));
      }
    }
  }
  return best;
}

}  // namespace strikeaudit::oracle
