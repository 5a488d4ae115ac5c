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

#include "strikeaudit/audit.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>
#include <unordered_map>

#include "strikeaudit/stats.hpp"

namespace strikeaudit {
namespace {

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e.what());
  } catch (const ArgumentError& e) {
    throw ArgumentError(name + ": " + e.what());
  }
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::string out;
  char buf[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    out += buf;
  }
  return out;
}

std::vector<DisparityFinding> leaf_disparity(const Tree& tree, const JurorTable& table,
                                             double alpha_level) {
  if (!(alpha_level > 0.0 && alpha_level < 1.0)) {
    throw ArgumentError("alpha_level must lie in (0, 1)");
  }
  for (const TreeNode& node : tree.nodes) {
    if (node.is_leaf()) continue;
    const std::string& name = tree.feature_names.at(static_cast<std::size_t>(node.feature));
    if (std::find(table.feature_catalog.begin(), table.feature_catalog.end(), name) ==
        table.feature_catalog.end()) {
      throw ContractViolation("tree splits on '" + name + "', which the table lacks");
    }
  }

  std::vector<ContingencyTable> counts(tree.nodes.size());
  for (const JurorRecord& r : table.records) {
    int v = 0;
    while (!tree.nodes[static_cast<std::size_t>(v)].is_leaf()) {
      const TreeNode& node = tree.nodes[static_cast<std::size_t>(v)];
      const auto it =
          r.answers.find(tree.feature_names[static_cast<std::size_t>(node.feature)]);
      const bool yes = it != r.answers.end() && it->second == Answer::kYes;
      v = yes ? node.right : node.left;
    }
    ContingencyTable& t = counts[static_cast<std::size_t>(v)];
    if (r.is_black) {
      (r.struck_by_state ? t.a : t.b) += 1;
    } else {
      (r.struck_by_state ? t.c : t.d) += 1;
    }
  }

  std::vector<DisparityFinding> findings;
  std::vector<double> raw;
  std::vector<std::size_t> tested;
  for (int leaf : tree.leaves()) {
    const ContingencyTable& t = counts[static_cast<std::size_t>(leaf)];
    DisparityFinding f;
    f.leaf = leaf;
    f.path = describe_path(tree, leaf);
    f.n_black = t.a + t.b;
    f.struck_black = t.a;
    f.n_nonblack = t.c + t.d;
    f.struck_nonblack = t.c;
    if (f.n_black > 0) {
      f.rate_black = static_cast<double>(t.a) / static_cast<double>(f.n_black);
    }
    if (f.n_nonblack > 0) {
      f.rate_nonblack = static_cast<double>(t.c) / static_cast<double>(f.n_nonblack);
    }
    f.p_raw = fisher_exact(t);
    if (f.p_raw) {
      raw.push_back(*f.p_raw);
      tested.push_back(findings.size());
    } else {
      f.skipped = true;
      f.reason = "degenerate margin";
    }
    findings.push_back(std::move(f));
  }

  const std::vector<double> adjusted = holm_adjust(raw);
  for (std::size_t i = 0; i < tested.size(); ++i) {
    DisparityFinding& f = findings[tested[i]];
    f.p_adjusted = adjusted[i];
    f.significant = adjusted[i] < alpha_level;
  }
  return findings;
}

AblationResult ablation_auc(const FeatureMatrix& train, const FeatureMatrix& test,
                            std::size_t k_max, std::size_t folds, std::uint64_t seed,
                            const FitSettings& settings, const SubsetPathOptions& options) {
  if (train.race_columns.empty()) {
    throw ContractViolation("ablation needs race columns in the design matrix");
  }
  AblationResult out;
  out.full = subset_path(train, test, std::min(k_max, train.cols()), folds, seed, settings,
                         options);
  const FeatureMatrix train_ablated = train.without_race_columns();
  const FeatureMatrix test_ablated = test.without_race_columns();
  if (train_ablated.cols() == 0) {
    throw DegenerateDataError("no columns remain after removing race columns");
  }
  out.ablated = subset_path(train_ablated, test_ablated,
                            std::min(k_max, train_ablated.cols()), folds, seed, settings,
                            options);
  out.auc_full = out.full.test_auc;
  out.auc_ablated = out.ablated.test_auc;
  return out;
}

AuditReport run_audit(const AuditConfig& cfg) {
  const std::string bytes = stage("load", [&] { return read_bytes(cfg.input); });
  const JurorTable table = stage("load", [&] {
    std::istringstream in(bytes);
    return read_csv(in, cfg.catalog);
  });
  return run_audit(cfg, table, bytes);
}

AuditReport run_audit(const AuditConfig& cfg, const JurorTable& table,
                      std::string_view input_bytes) {
  AuditReport report;
  report.config = cfg;
  report.config.tree.seed = cfg.seed;
  report.config.tree.threads = cfg.threads;
  Provenance& prov = report.provenance;
  prov.input = cfg.input.generic_string();
  prov.dataset_sha256 = sha256_hex(input_bytes);
  prov.seed = cfg.seed;
  prov.records = table.size();

  const JurorTable eligible = stage("filter_eligible", [&] {
    JurorTable t = filter_eligible(table);
    if (t.empty()) throw DegenerateDataError("no strike-eligible records");
    return t;
  });
  prov.eligible_records = eligible.size();

  const FeatureMatrix matrix = stage("build_matrix", [&] {
    return build_matrix(eligible, cfg.missing);
  });
  prov.matrix_rows = matrix.rows();
  report.dropped_columns = matrix.dropped_columns;

  const SplitResult parts = stage("split", [&] {
    return split(matrix, cfg.train_fraction, cfg.seed);
  });
  prov.train_rows = parts.train.rows();
  prov.test_rows = parts.test.rows();

  FitSettings fit_settings = FitSettings::for_rows(parts.train.rows());
  if (cfg.ridge) {
    if (!(*cfg.ridge >= 0.0)) throw ArgumentError("subset_path: ridge must be non-negative");
    fit_settings.ridge = *cfg.ridge;
  }
  prov.ridge = fit_settings.ridge;
  const SubsetPathOptions path_options{cfg.threads, cfg.node_budget};

  report.subset_path = stage("subset_path", [&] {
    return subset_path(parts.train, parts.test, std::min(cfg.k_max, parts.train.cols()),
                       cfg.folds, cfg.seed, fit_settings, path_options);
  });
  report.importance = stage("importance_profile", [&] {
    return importance_profile(report.subset_path);
  });

  // The full-column half of the ablation is the path computed above: same
  // data, seed and settings.
  stage("ablation", [&] {
    if (parts.train.race_columns.empty()) {
      throw ContractViolation("ablation needs race columns in the design matrix");
    }
    const FeatureMatrix train_ablated = parts.train.without_race_columns();
    const FeatureMatrix test_ablated = parts.test.without_race_columns();
    if (train_ablated.cols() == 0) {
      throw DegenerateDataError("no columns remain after removing race columns");
    }
    const SubsetPath ablated =
        subset_path(train_ablated, test_ablated, std::min(cfg.k_max, train_ablated.cols()),
                    cfg.folds, cfg.seed, fit_settings, path_options);
    report.auc_full = report.subset_path.test_auc;
    report.auc_ablated = ablated.test_auc;
    report.ablated_chosen_k = ablated.chosen_k;
  });

  const AlphaTuning tuning = stage("tree", [&] {
    const FeatureMatrix tree_train = parts.train.without_race_columns();
    return tune_alpha(tree_train, cfg.alpha_grid, cfg.folds, cfg.seed, report.config.tree);
  });
  report.tree_alpha = tuning.alpha;
  report.alpha_cv_error = tuning.cv_error;
  report.tree = tuning.tree;
  report.config.tree.alpha = tuning.alpha;

  report.findings = stage("leaf_disparity", [&] {
    return leaf_disparity(report.tree, eligible, cfg.alpha_level);
  });
  return report;
}

}  // namespace strikeaudit
