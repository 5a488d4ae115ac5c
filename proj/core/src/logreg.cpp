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

#include "strikeaudit/logreg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "strikeaudit/errors.hpp"

namespace strikeaudit {
namespace {

// Linear predictor magnitude past which an unpenalized fit is treated as
// diverging: sigmoid(15) is 1 - 3.1e-7, and the gradient reaches the
// default tolerance only beyond this point when the data are separable.
constexpr double kSeparationEta = 15.0;
constexpr int kMaxHalvings = 60;

double softplus(double eta) {
  return std::max(eta, 0.0) + std::log1p(std::exp(-std::abs(eta)));
}

double sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

// Binomial observations: `count` trials with `success` successes sharing
// covariate row x(i, .). Per-row data uses count = 1.
struct WeightedDesign {
  Eigen::MatrixXd x;
  Eigen::VectorXd count;
  Eigen::VectorXd success;
};

class NewtonSolver {
 public:
  NewtonSolver(const WeightedDesign& d, double ridge) : d_(d), ridge_(ridge) {}

  double objective(const Eigen::VectorXd& theta, Eigen::VectorXd& eta) const {
    linear_predictor(theta, eta);
    // Extended accumulator: with a plain double sum the rounding noise on
    // thousands of rows exceeds the line-search slack near the optimum.
    long double f = 0.0L;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      f += static_cast<long double>(d_.count(i) * softplus(eta(i))) -
           static_cast<long double>(d_.success(i) * eta(i));
    }
    const auto beta = theta.tail(theta.size() - 1);
    return static_cast<double>(f + 0.5L * ridge_ * beta.squaredNorm());
  }

  LogisticModel solve(Eigen::VectorXd theta, const FitSettings& s) const {
    const Eigen::Index q = d_.x.cols();
    LogisticModel model;
    model.ridge = ridge_;
    FitDiagnostics& diag = model.diagnostics;

    Eigen::VectorXd eta;
    double f = objective(theta, eta);
    diag.objective_trace.push_back(f);

    Eigen::VectorXd grad(q + 1);
    Eigen::MatrixXd hess(q + 1, q + 1);
    Eigen::VectorXd trial_eta;
    for (;;) {
      derivatives(theta, eta, grad, hess);
      diag.max_abs_gradient = grad.cwiseAbs().maxCoeff();
      if (ridge_ == 0.0 && eta.size() > 0 && eta.cwiseAbs().maxCoeff() > kSeparationEta) {
        diag.separation = true;
        break;
      }
      if (diag.max_abs_gradient <= s.tolerance) {
        diag.converged = true;
        break;
      }
      if (diag.iterations >= s.max_iterations) break;

      Eigen::VectorXd step = newton_step(hess, grad);
      const double slack = 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f));
      double t = 1.0;
      bool accepted = false;
      for (int h = 0; h < kMaxHalvings; ++h, t *= 0.5) {
        Eigen::VectorXd trial = theta - t * step;
        const double trial_f = objective(trial, trial_eta);
        if (std::isfinite(trial_f) && trial_f <= f + slack) {
          theta = std::move(trial);
          eta.swap(trial_eta);
          f = trial_f;
          accepted = true;
          break;
        }
      }
      ++diag.iterations;
      if (!accepted) break;  // stalled at numerical precision
      diag.objective_trace.push_back(f);
#ifndef NDEBUG
      const auto& tr = diag.objective_trace;
      assert(tr[tr.size() - 1] <= tr[tr.size() - 2] + slack);
#endif
    }
    diag.final_nll = f;
    model.intercept = theta(0);
    model.beta = theta.tail(q);
    return model;
  }

 private:
  void linear_predictor(const Eigen::VectorXd& theta, Eigen::VectorXd& eta) const {
    const Eigen::Index q = d_.x.cols();
    if (q == 0) {
      eta = Eigen::VectorXd::Constant(d_.x.rows(), theta(0));
    } else {
      eta.noalias() = d_.x * theta.tail(q);
      eta.array() += theta(0);
    }
  }

  void derivatives(const Eigen::VectorXd& theta, const Eigen::VectorXd& eta,
                   Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const {
    const Eigen::Index q = d_.x.cols();
    Eigen::VectorXd resid(eta.size());
    Eigen::VectorXd weight(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      const double p = sigmoid(eta(i));
      resid(i) = d_.count(i) * p - d_.success(i);
      weight(i) = d_.count(i) * p * (1.0 - p);
    }
    grad(0) = resid.sum();
    hess(0, 0) = weight.sum();
    if (q > 0) {
      grad.tail(q).noalias() = d_.x.transpose() * resid;
      grad.tail(q) += ridge_ * theta.tail(q);
      const Eigen::MatrixXd weighted = d_.x.array().colwise() * weight.array();
      hess.block(1, 0, q, 1).noalias() = weighted.transpose() * Eigen::VectorXd::Ones(eta.size());
      hess.block(0, 1, 1, q) = hess.block(1, 0, q, 1).transpose();
      hess.bottomRightCorner(q, q).noalias() = d_.x.transpose() * weighted;
      hess.bottomRightCorner(q, q).diagonal().array() += ridge_;
    }
  }

  static Eigen::VectorXd newton_step(const Eigen::MatrixXd& hess,
                                     const Eigen::VectorXd& grad) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      Eigen::VectorXd step = ldlt.solve(grad);
      if (step.allFinite()) return step;
    }
    // Indefinite to rounding or rank deficient: damp until solvable.
    double damping = 1e-10 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff());
    for (int attempt = 0; attempt < 30; ++attempt, damping *= 10.0) {
      Eigen::MatrixXd damped = hess;
      damped.diagonal().array() += damping;
      Eigen::LLT<Eigen::MatrixXd> llt(damped);
      if (llt.info() == Eigen::Success) return llt.solve(grad);
    }
    return grad;  // gradient descent direction as a last resort
  }

  const WeightedDesign& d_;
  double ridge_;
};

std::vector<std::size_t> normalized_support(std::span<const std::size_t> support,
                                            std::size_t cols) {
  std::vector<std::size_t> out(support.begin(), support.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (!out.empty() && out.back() >= cols) {
    throw ArgumentError("support index " + std::to_string(out.back()) +
                        " out of range for " + std::to_string(cols) + " columns");
  }
  return out;
}

void check_settings(const FitSettings& s) {
  if (!(s.ridge >= 0.0)) throw ArgumentError("ridge must be non-negative");
  if (!(s.tolerance > 0.0)) throw ArgumentError("tolerance must be positive");
}

Eigen::VectorXd linear_predictor(const LogisticModel& model, const FeatureMatrix& m) {
  if (static_cast<std::size_t>(model.beta.size()) != model.support.size()) {
    throw ArgumentError("model beta and support differ in length");
  }
  Eigen::VectorXd eta = Eigen::VectorXd::Constant(m.x.rows(), model.intercept);
  for (std::size_t j = 0; j < model.support.size(); ++j) {
    if (model.support[j] >= m.cols()) throw ArgumentError("support index out of range");
    eta += model.beta(static_cast<Eigen::Index>(j)) *
           m.x.col(static_cast<Eigen::Index>(model.support[j]));
  }
  return eta;
}

}  // namespace

FitSettings FitSettings::for_rows(std::size_t n) {
  FitSettings s;
  s.ridge = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  return s;
}

double nll(const LogisticModel& model, const FeatureMatrix& m) {
  const Eigen::VectorXd eta = linear_predictor(model, m);
  double f = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) f += softplus(eta(i)) - m.y(i) * eta(i);
  return f + 0.5 * model.ridge * model.beta.squaredNorm();
}

Eigen::VectorXd gradient(const LogisticModel& model, const FeatureMatrix& m) {
  const Eigen::VectorXd eta = linear_predictor(model, m);
  Eigen::VectorXd resid(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) resid(i) = sigmoid(eta(i)) - m.y(i);
  const auto q = static_cast<Eigen::Index>(model.support.size());
  Eigen::VectorXd g(q + 1);
  g(0) = resid.sum();
  for (Eigen::Index j = 0; j < q; ++j) {
    g(j + 1) = m.x.col(static_cast<Eigen::Index>(model.support[static_cast<std::size_t>(j)]))
                   .dot(resid) +
               model.ridge * model.beta(j);
  }
  return g;
}

LogisticModel fit(const FeatureMatrix& m, std::span<const std::size_t> support,
                  const FitSettings& settings) {
  check_settings(settings);
  if (m.rows() == 0) throw ArgumentError("cannot fit on an empty matrix");
  std::vector<std::size_t> cols = normalized_support(support, m.cols());

  WeightedDesign d;
  d.x.resize(m.x.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    d.x.col(static_cast<Eigen::Index>(j)) = m.x.col(static_cast<Eigen::Index>(cols[j]));
  }
  d.count = Eigen::VectorXd::Ones(m.x.rows());
  d.success = m.y;

  NewtonSolver solver(d, settings.ridge);
  LogisticModel model = solver.solve(
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cols.size()) + 1), settings);
  model.support = std::move(cols);
  return model;
}

Eigen::VectorXd predict_proba(const LogisticModel& model, const FeatureMatrix& m) {
  Eigen::VectorXd eta = linear_predictor(model, m);
  for (Eigen::Index i = 0; i < eta.size(); ++i) eta(i) = sigmoid(eta(i));
  return eta;
}

WaldResult wald_pvalues(const LogisticModel& model, const FeatureMatrix& m) {
  if (!model.diagnostics.converged) {
    throw ContractViolation("Wald inference needs a converged fit");
  }
  const Eigen::VectorXd eta = linear_predictor(model, m);
  const auto q = static_cast<Eigen::Index>(model.support.size());
  const Eigen::Index n = m.x.rows();

  Eigen::MatrixXd design(n, q + 1);
  design.col(0).setOnes();
  for (Eigen::Index j = 0; j < q; ++j) {
    design.col(j + 1) = m.x.col(static_cast<Eigen::Index>(model.support[static_cast<std::size_t>(j)]));
  }
  Eigen::VectorXd weight(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = sigmoid(eta(i));
    weight(i) = p * (1.0 - p);
  }
  Eigen::MatrixXd info = design.transpose() * (design.array().colwise() * weight.array()).matrix();
  info.diagonal().tail(q).array() += model.ridge;

  auto name_of = [&](Eigen::Index k) {
    return k == 0 ? std::string("intercept")
                  : m.columns[model.support[static_cast<std::size_t>(k - 1)]];
  };

  // Rank check on the column-equilibrated matrix so scale differences
  // between the intercept and sparse indicators do not mask dependence.
  const Eigen::VectorXd scale = info.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd scaled = scale.asDiagonal() * info * scale.asDiagonal();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(scaled);
  lu.setThreshold(1e-10);
  if (lu.rank() < q + 1) {
    const Eigen::MatrixXd kernel = lu.kernel();
    std::string names;
    for (Eigen::Index k = 0; k < q + 1; ++k) {
      if (kernel.row(k).cwiseAbs().maxCoeff() > 1e-8) {
        if (!names.empty()) names += ", ";
        names += name_of(k);
      }
    }
    throw CollinearityError("singular information matrix; dependent columns: " + names);
  }
  const Eigen::MatrixXd cov = info.inverse();

  WaldResult out;
  out.approximate = model.ridge > 0.0;
  for (Eigen::Index k = 0; k < q + 1; ++k) {
    const double se = std::sqrt(cov(k, k));
    const double estimate = k == 0 ? model.intercept : model.beta(k - 1);
    const double z = estimate / se;
    out.p_values.emplace_back(name_of(k), std::erfc(std::abs(z) / std::sqrt(2.0)));
    out.standard_errors.push_back(se);
  }
  return out;
}

BinaryDesign::BinaryDesign(const FeatureMatrix& m) : cols_(m.cols()) {
  if (cols_ > 63) throw ArgumentError("BinaryDesign supports at most 63 columns");
  row_bits_.resize(m.rows());
  labels_.resize(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    std::uint64_t bits = 0;
    for (std::size_t j = 0; j < cols_; ++j) {
      if (m.x(r, static_cast<Eigen::Index>(j)) != 0.0) bits |= std::uint64_t{1} << j;
    }
    row_bits_[i] = bits;
    labels_[i] = m.y(r) != 0.0 ? 1 : 0;
  }
}

LogisticModel BinaryDesign::fit(std::span<const std::size_t> support,
                                const FitSettings& settings,
                                std::span<const double> warm_start) const {
  check_settings(settings);
  if (rows() == 0) throw ArgumentError("cannot fit on an empty matrix");
  std::vector<std::size_t> cols = normalized_support(support, cols_);
  const std::size_t q = cols.size();

  // Pattern in the high bits, label in bit 0, so sorting groups patterns.
  std::vector<std::uint64_t> keys(rows());
  for (std::size_t i = 0; i < rows(); ++i) {
    std::uint64_t pattern = 0;
    for (std::size_t j = 0; j < q; ++j) pattern |= ((row_bits_[i] >> cols[j]) & 1u) << j;
    keys[i] = (pattern << 1) | labels_[i];
  }
  std::sort(keys.begin(), keys.end());

  std::vector<std::uint64_t> patterns;
  std::vector<double> counts;
  std::vector<double> successes;
  for (std::uint64_t key : keys) {
    const std::uint64_t pattern = key >> 1;
    if (patterns.empty() || patterns.back() != pattern) {
      patterns.push_back(pattern);
      counts.push_back(0.0);
      successes.push_back(0.0);
    }
    counts.back() += 1.0;
    successes.back() += static_cast<double>(key & 1u);
  }

  WeightedDesign d;
  const auto groups = static_cast<Eigen::Index>(patterns.size());
  d.x.resize(groups, static_cast<Eigen::Index>(q));
  for (Eigen::Index g = 0; g < groups; ++g) {
    for (std::size_t j = 0; j < q; ++j) {
      d.x(g, static_cast<Eigen::Index>(j)) =
          static_cast<double>((patterns[static_cast<std::size_t>(g)] >> j) & 1u);
    }
  }
  d.count = Eigen::Map<const Eigen::VectorXd>(counts.data(), groups);
  d.success = Eigen::Map<const Eigen::VectorXd>(successes.data(), groups);

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(q) + 1);
  if (warm_start.size() == q + 1) {
    theta = Eigen::Map<const Eigen::VectorXd>(warm_start.data(), theta.size());
  } else if (!warm_start.empty()) {
    throw ArgumentError("warm start length does not match support");
  }

  NewtonSolver solver(d, settings.ridge);
  LogisticModel model = solver.solve(std::move(theta), settings);
  model.support = std::move(cols);
  return model;
}

}  // namespace strikeaudit
