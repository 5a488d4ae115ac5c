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

#include "strikeaudit/serialization.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "csv.hpp"
#include "strikeaudit/errors.hpp"

namespace strikeaudit {
namespace {

using nlohmann::json;

template <typename Fn>
auto guarded(const std::string& what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw SchemaError("malformed " + what + " document: " + e.what());
  }
}

std::size_t index_of(std::span<const std::string> columns, const std::string& name) {
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] == name) return j;
  }
  throw SchemaError("unknown column '" + name + "'");
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

json node_to_json(const Tree& tree, int v) {
  const TreeNode& node = tree.nodes.at(static_cast<std::size_t>(v));
  if (node.is_leaf()) {
    return {{"leaf", {{"id", v}, {"n", node.n}, {"n_struck", node.n_struck}}}};
  }
  return {{"id", v},
          {"feature", tree.feature_names.at(static_cast<std::size_t>(node.feature))},
          {"n", node.n},
          {"n_struck", node.n_struck},
          {"left", node_to_json(tree, node.left)},
          {"right", node_to_json(tree, node.right)}};
}

void node_from_json(const json& j, Tree& tree) {
  const auto id = tree.nodes.size();
  tree.nodes.emplace_back();
  TreeNode node;
  const json& counts = j.contains("leaf") ? j.at("leaf") : j;
  node.n = counts.at("n").get<std::int64_t>();
  node.n_struck = counts.at("n_struck").get<std::int64_t>();
  if (node.n < 0 || node.n_struck < 0 || node.n_struck > node.n) {
    throw SchemaError("tree node has inconsistent counts");
  }
  node.p_strike =
      node.n > 0 ? static_cast<double>(node.n_struck) / static_cast<double>(node.n) : 0.0;
  if (!j.contains("leaf")) {
    node.feature = static_cast<int>(
        index_of(tree.feature_names, j.at("feature").get<std::string>()));
    node.left = static_cast<int>(tree.nodes.size());
    node_from_json(j.at("left"), tree);
    node.right = static_cast<int>(tree.nodes.size());
    node_from_json(j.at("right"), tree);
  }
  tree.nodes[id] = node;
}

json entry_to_json(const SubsetPathEntry& e, std::span<const std::string> columns) {
  json support = json::array();
  for (std::size_t j : e.support) support.push_back(columns[j]);
  return {{"k", e.k},
          {"support", support},
          {"fold_auc", e.fold_auc},
          {"cv_auc_mean", e.cv_auc_mean},
          {"cv_auc_sd", e.cv_auc_sd},
          {"train_nll", e.train_nll},
          {"certified_optimal", e.certified_optimal},
          {"model", model_to_json(e.model, columns)}};
}

std::string missing_name(MissingPolicy p) {
  return p == MissingPolicy::kAsNo ? "as_no" : "drop_row";
}

MissingPolicy missing_from(const std::string& s) {
  if (s == "as_no") return MissingPolicy::kAsNo;
  if (s == "drop_row") return MissingPolicy::kDropRow;
  throw SchemaError("missing policy must be 'as_no' or 'drop_row', got '" + s + "'");
}

std::string join_path(const std::vector<PathCondition>& path) {
  std::string out;
  for (const PathCondition& c : path) {
    if (!out.empty()) out += " & ";
    out += c.to_string();
  }
  return out.empty() ? "(all)" : out;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string scientific(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", *v);
  return buf;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return {buf, result.ptr};
}

std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

json model_to_json(const LogisticModel& model, std::span<const std::string> columns) {
  json support = json::array();
  for (std::size_t j : model.support) support.push_back(columns[j]);
  json beta = json::array();
  for (Eigen::Index i = 0; i < model.beta.size(); ++i) beta.push_back(model.beta(i));
  const FitDiagnostics& d = model.diagnostics;
  return {{"support", support},
          {"beta", beta},
          {"intercept", model.intercept},
          {"ridge", model.ridge},
          {"diagnostics",
           {{"final_nll", d.final_nll},
            {"iterations", d.iterations},
            {"converged", d.converged},
            {"max_abs_gradient", d.max_abs_gradient},
            {"separation", d.separation}}}};
}

LogisticModel model_from_json(const json& doc, std::span<const std::string> columns) {
  return guarded("model", [&] {
    LogisticModel model;
    const auto names = doc.at("support").get<std::vector<std::string>>();
    const auto beta = doc.at("beta").get<std::vector<double>>();
    if (names.size() != beta.size()) throw SchemaError("support and beta differ in length");
    std::vector<std::pair<std::size_t, double>> terms;
    for (std::size_t i = 0; i < names.size(); ++i) {
      terms.emplace_back(index_of(columns, names[i]), beta[i]);
    }
    std::sort(terms.begin(), terms.end());
    model.beta.resize(static_cast<Eigen::Index>(terms.size()));
    for (std::size_t i = 0; i < terms.size(); ++i) {
      model.support.push_back(terms[i].first);
      model.beta(static_cast<Eigen::Index>(i)) = terms[i].second;
    }
    model.intercept = doc.at("intercept").get<double>();
    model.ridge = doc.at("ridge").get<double>();
    const json& d = doc.at("diagnostics");
    model.diagnostics.final_nll = d.at("final_nll").get<double>();
    model.diagnostics.iterations = d.at("iterations").get<std::size_t>();
    model.diagnostics.converged = d.at("converged").get<bool>();
    model.diagnostics.max_abs_gradient = d.at("max_abs_gradient").get<double>();
    model.diagnostics.separation = d.at("separation").get<bool>();
    return model;
  });
}

json tree_to_json(const Tree& tree) {
  return {{"feature_names", tree.feature_names},
          {"root", tree.nodes.empty() ? json(nullptr) : node_to_json(tree, 0)}};
}

Tree tree_from_json(const json& doc) {
  return guarded("tree", [&] {
    Tree tree;
    tree.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    if (!doc.at("root").is_null()) node_from_json(doc.at("root"), tree);
    return tree;
  });
}

json subset_path_to_json(const SubsetPath& path) {
  json entries = json::array();
  for (const SubsetPathEntry& e : path.entries) entries.push_back(entry_to_json(e, path.columns));
  return {{"columns", path.columns},
          {"entries", entries},
          {"chosen_k", path.chosen_k},
          {"test_auc", path.test_auc}};
}

SubsetPath subset_path_from_json(const json& doc) {
  return guarded("subset path", [&] {
    SubsetPath path;
    path.columns = doc.at("columns").get<std::vector<std::string>>();
    path.chosen_k = doc.at("chosen_k").get<std::size_t>();
    path.test_auc = doc.at("test_auc").get<double>();
    for (const json& j : doc.at("entries")) {
      SubsetPathEntry e;
      e.k = j.at("k").get<std::size_t>();
      for (const auto& name : j.at("support").get<std::vector<std::string>>()) {
        e.support.push_back(index_of(path.columns, name));
      }
      std::sort(e.support.begin(), e.support.end());
      e.fold_auc = j.at("fold_auc").get<std::vector<double>>();
      e.cv_auc_mean = j.at("cv_auc_mean").get<double>();
      e.cv_auc_sd = j.at("cv_auc_sd").get<double>();
      e.train_nll = j.at("train_nll").get<double>();
      e.certified_optimal = j.at("certified_optimal").get<bool>();
      e.model = model_from_json(j.at("model"), path.columns);
      path.entries.push_back(std::move(e));
    }
    if (path.chosen_k < 1 || path.chosen_k > path.entries.size()) {
      throw SchemaError("chosen_k out of range");
    }
    return path;
  });
}

json importance_to_json(const ImportanceProfile& profile) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < profile.importance.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < profile.importance.cols(); ++c) {
      row.push_back(profile.importance(r, c));
    }
    rows.push_back(row);
  }
  return {{"columns", profile.columns}, {"ks", profile.ks}, {"importance", rows}};
}

ImportanceProfile importance_from_json(const json& doc) {
  return guarded("importance", [&] {
    ImportanceProfile p;
    p.columns = doc.at("columns").get<std::vector<std::string>>();
    p.ks = doc.at("ks").get<std::vector<std::size_t>>();
    const json& rows = doc.at("importance");
    if (rows.size() != p.ks.size()) throw SchemaError("importance rows do not match ks");
    p.importance.resize(static_cast<Eigen::Index>(p.ks.size()),
                        static_cast<Eigen::Index>(p.columns.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto row = rows[r].get<std::vector<double>>();
      if (row.size() != p.columns.size()) throw SchemaError("importance row has wrong width");
      for (std::size_t c = 0; c < row.size(); ++c) {
        p.importance(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
      }
    }
    return p;
  });
}

json findings_to_json(std::span<const DisparityFinding> findings) {
  json out = json::array();
  for (const DisparityFinding& f : findings) {
    json path = json::array();
    for (const PathCondition& c : f.path) {
      path.push_back({{"feature", c.feature}, {"value", c.value}});
    }
    out.push_back({{"leaf", f.leaf},
                   {"path", path},
                   {"n_black", f.n_black},
                   {"struck_black", f.struck_black},
                   {"n_nonblack", f.n_nonblack},
                   {"struck_nonblack", f.struck_nonblack},
                   {"rate_black", optional_number(f.rate_black)},
                   {"rate_nonblack", optional_number(f.rate_nonblack)},
                   {"p_raw", optional_number(f.p_raw)},
                   {"p_adjusted", optional_number(f.p_adjusted)},
                   {"significant", f.significant},
                   {"skipped", f.skipped},
                   {"reason", f.reason}});
  }
  return out;
}

std::vector<DisparityFinding> findings_from_json(const json& doc) {
  return guarded("findings", [&] {
    std::vector<DisparityFinding> out;
    for (const json& j : doc) {
      DisparityFinding f;
      f.leaf = j.at("leaf").get<int>();
      for (const json& c : j.at("path")) {
        f.path.push_back({c.at("feature").get<std::string>(), c.at("value").get<bool>()});
      }
      f.n_black = j.at("n_black").get<std::int64_t>();
      f.struck_black = j.at("struck_black").get<std::int64_t>();
      f.n_nonblack = j.at("n_nonblack").get<std::int64_t>();
      f.struck_nonblack = j.at("struck_nonblack").get<std::int64_t>();
      f.rate_black = read_optional(j, "rate_black");
      f.rate_nonblack = read_optional(j, "rate_nonblack");
      f.p_raw = read_optional(j, "p_raw");
      f.p_adjusted = read_optional(j, "p_adjusted");
      f.significant = j.at("significant").get<bool>();
      f.skipped = j.at("skipped").get<bool>();
      f.reason = j.at("reason").get<std::string>();
      out.push_back(std::move(f));
    }
    return out;
  });
}

json audit_config_to_json(const AuditConfig& cfg) {
  return {{"input", cfg.input.generic_string()},
          {"catalog", cfg.catalog},
          {"seed", cfg.seed},
          {"train_fraction", cfg.train_fraction},
          {"k_max", cfg.k_max},
          {"folds", cfg.folds},
          {"ridge", optional_number(cfg.ridge)},
          {"missing", missing_name(cfg.missing)},
          {"tree",
           {{"max_depth", cfg.tree.max_depth},
            {"alpha", cfg.tree.alpha},
            {"min_leaf", cfg.tree.min_leaf},
            {"restarts", cfg.tree.restarts}}},
          {"alpha_grid", cfg.alpha_grid},
          {"alpha_level", cfg.alpha_level},
          {"node_budget", cfg.node_budget}};
}

void audit_config_from_json(const json& doc, AuditConfig& cfg) {
  guarded("config", [&] {
    if (!doc.is_object()) throw SchemaError("config must be a JSON object");
    static const char* const kKnown[] = {
        "input",   "catalog", "seed",       "train_fraction", "k_max",       "folds",
        "ridge",   "missing", "tree",       "alpha_grid",     "alpha_level", "node_budget",
        "threads"};
    for (const auto& item : doc.items()) {
      if (std::find(std::begin(kKnown), std::end(kKnown), item.key()) == std::end(kKnown)) {
        throw SchemaError("unknown config key '" + item.key() + "'");
      }
    }
    if (doc.contains("input")) cfg.input = doc["input"].get<std::string>();
    if (doc.contains("catalog")) cfg.catalog = doc["catalog"].get<std::vector<std::string>>();
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("train_fraction")) cfg.train_fraction = doc["train_fraction"].get<double>();
    if (doc.contains("k_max")) cfg.k_max = doc["k_max"].get<std::size_t>();
    if (doc.contains("folds")) cfg.folds = doc["folds"].get<std::size_t>();
    if (doc.contains("ridge")) cfg.ridge = read_optional(doc, "ridge");
    if (doc.contains("missing")) cfg.missing = missing_from(doc["missing"].get<std::string>());
    if (doc.contains("tree")) {
      const json& t = doc["tree"];
      if (t.contains("max_depth")) cfg.tree.max_depth = t["max_depth"].get<std::size_t>();
      if (t.contains("alpha")) cfg.tree.alpha = t["alpha"].get<double>();
      if (t.contains("min_leaf")) cfg.tree.min_leaf = t["min_leaf"].get<std::size_t>();
      if (t.contains("restarts")) cfg.tree.restarts = t["restarts"].get<std::size_t>();
    }
    if (doc.contains("alpha_grid")) cfg.alpha_grid = doc["alpha_grid"].get<std::vector<double>>();
    if (doc.contains("alpha_level")) cfg.alpha_level = doc["alpha_level"].get<double>();
    if (doc.contains("node_budget")) cfg.node_budget = doc["node_budget"].get<std::size_t>();
    if (doc.contains("threads")) cfg.threads = doc["threads"].get<int>();
  });
}

json report_to_json(const AuditReport& report) {
  const Provenance& p = report.provenance;
  json tree = tree_to_json(report.tree);
  return {{"config", audit_config_to_json(report.config)},
          {"provenance",
           {{"input", p.input},
            {"dataset_sha256", p.dataset_sha256},
            {"seed", p.seed},
            {"records", p.records},
            {"eligible_records", p.eligible_records},
            {"matrix_rows", p.matrix_rows},
            {"train_rows", p.train_rows},
            {"test_rows", p.test_rows},
            {"ridge", p.ridge}}},
          {"dropped_columns", report.dropped_columns},
          {"subset_path", subset_path_to_json(report.subset_path)},
          {"chosen_model", model_to_json(report.chosen_model(), report.subset_path.columns)},
          {"importance", importance_to_json(report.importance)},
          {"ablation",
           {{"auc_full", report.auc_full},
            {"auc_ablated", report.auc_ablated},
            {"ablated_chosen_k", report.ablated_chosen_k}}},
          {"tree_tuning", {{"alpha", report.tree_alpha}, {"cv_error", report.alpha_cv_error}}},
          {"tree", tree},
          {"findings", findings_to_json(report.findings)}};
}

AuditReport report_from_json(const json& doc) {
  return guarded("report", [&] {
    AuditReport r;
    audit_config_from_json(doc.at("config"), r.config);
    const json& p = doc.at("provenance");
    r.provenance.input = p.at("input").get<std::string>();
    r.provenance.dataset_sha256 = p.at("dataset_sha256").get<std::string>();
    r.provenance.seed = p.at("seed").get<std::uint64_t>();
    r.provenance.records = p.at("records").get<std::size_t>();
    r.provenance.eligible_records = p.at("eligible_records").get<std::size_t>();
    r.provenance.matrix_rows = p.at("matrix_rows").get<std::size_t>();
    r.provenance.train_rows = p.at("train_rows").get<std::size_t>();
    r.provenance.test_rows = p.at("test_rows").get<std::size_t>();
    r.provenance.ridge = p.at("ridge").get<double>();
    r.dropped_columns = doc.at("dropped_columns").get<std::vector<std::string>>();
    r.subset_path = subset_path_from_json(doc.at("subset_path"));
    r.importance = importance_from_json(doc.at("importance"));
    const json& a = doc.at("ablation");
    r.auc_full = a.at("auc_full").get<double>();
    r.auc_ablated = a.at("auc_ablated").get<double>();
    r.ablated_chosen_k = a.at("ablated_chosen_k").get<std::size_t>();
    const json& t = doc.at("tree_tuning");
    r.tree_alpha = t.at("alpha").get<double>();
    r.alpha_cv_error = t.at("cv_error").get<std::vector<double>>();
    r.tree = tree_from_json(doc.at("tree"));
    r.findings = findings_from_json(doc.at("findings"));
    return r;
  });
}

void write_curve_csv(const SubsetPath& path, std::ostream& out) {
  csv::write_row(out, {"k", "cv_auc_mean", "cv_auc_sd"});
  for (const SubsetPathEntry& e : path.entries) {
    csv::write_row(out, {std::to_string(e.k), format_number(e.cv_auc_mean),
                         format_number(e.cv_auc_sd)});
  }
}

void write_importance_csv(const ImportanceProfile& profile, std::ostream& out) {
  std::vector<std::string> row{"k"};
  row.insert(row.end(), profile.columns.begin(), profile.columns.end());
  csv::write_row(out, row);
  for (std::size_t r = 0; r < profile.ks.size(); ++r) {
    row.assign(1, std::to_string(profile.ks[r]));
    for (std::size_t c = 0; c < profile.columns.size(); ++c) {
      row.push_back(format_number(
          profile.importance(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))));
    }
    csv::write_row(out, row);
  }
}

void write_disparity_csv(std::span<const DisparityFinding> findings, std::ostream& out) {
  csv::write_row(out, {"leaf", "path", "n_black", "struck_black", "n_nonblack",
                       "struck_nonblack", "rate_black", "rate_nonblack", "p_raw",
                       "p_adjusted", "significant", "skipped", "reason"});
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : ""; };
  for (const DisparityFinding& f : findings) {
    csv::write_row(out, {std::to_string(f.leaf), join_path(f.path), std::to_string(f.n_black),
                         std::to_string(f.struck_black), std::to_string(f.n_nonblack),
                         std::to_string(f.struck_nonblack), opt(f.rate_black),
                         opt(f.rate_nonblack), opt(f.p_raw), opt(f.p_adjusted),
                         f.significant ? "1" : "0", f.skipped ? "1" : "0", f.reason});
  }
}

std::string render_report_text(const AuditReport& report) {
  std::ostringstream out;
  const Provenance& p = report.provenance;
  out << "Input        " << p.input << "\n"
      << "SHA-256      " << p.dataset_sha256 << "\n"
      << "Seed         " << p.seed << "\n"
      << "Records      " << p.records << " (" << p.eligible_records << " eligible, "
      << p.train_rows << " train / " << p.test_rows << " test)\n"
      << "Ridge        " << format_number(p.ridge) << "\n";
  if (!report.dropped_columns.empty()) {
    out << "Dropped      ";
    for (const std::string& c : report.dropped_columns) out << c << ' ';
    out << "(constant)\n";
  }

  const SubsetPath& path = report.subset_path;
  out << "\nSubset path\n    k  cv_auc_mean  cv_auc_sd   train_nll  certified\n";
  for (const SubsetPathEntry& e : path.entries) {
    char line[128];
    std::snprintf(line, sizeof line, "%c %3zu  %11.4f  %9.4f  %10.3f  %s\n",
                  e.k == path.chosen_k ? '*' : ' ', e.k, e.cv_auc_mean, e.cv_auc_sd,
                  e.train_nll, e.certified_optimal ? "yes" : "no");
    out << line;
  }

  const LogisticModel& model = report.chosen_model();
  out << "\nChosen model: k = " << path.chosen_k << ", test AUC " << fixed(path.test_auc, 4)
      << "\n  " << fixed(model.intercept, 5) << "  intercept\n";
  for (std::size_t i = 0; i < model.support.size(); ++i) {
    out << "  " << fixed(model.beta(static_cast<Eigen::Index>(i)), 5) << "  "
        << path.columns[model.support[i]] << "\n";
  }

  out << "\nRace ablation: test AUC " << fixed(report.auc_full, 4) << " with race columns, "
      << fixed(report.auc_ablated, 4) << " without\n";

  out << "\nTree (alpha " << format_number(report.tree_alpha) << ", "
      << report.tree.leaf_count() << " leaves)\n"
      << render_rules(report.tree);

  out << "\nPer-leaf disparity\n";
  for (const DisparityFinding& f : report.findings) {
    out << "  leaf " << f.leaf << ": " << join_path(f.path) << "\n    black "
        << f.struck_black << "/" << f.n_black << ", non-black " << f.struck_nonblack << "/"
        << f.n_nonblack;
    if (f.skipped) {
      out << ", skipped (" << f.reason << ")\n";
    } else {
      out << ", p " << scientific(f.p_raw) << ", adjusted " << scientific(f.p_adjusted)
          << (f.significant ? ", significant" : "") << "\n";
    }
  }
  return out.str();
}

}  // namespace strikeaudit
