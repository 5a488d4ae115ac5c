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

#include "strikeaudit_cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <utility>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "strikeaudit/audit.hpp"
#include "strikeaudit/dataset.hpp"
#include "strikeaudit/errors.hpp"
#include "strikeaudit/logreg.hpp"
#include "strikeaudit/serialization.hpp"
#include "strikeaudit/subset_select.hpp"
#include "strikeaudit/synth.hpp"
#include "strikeaudit/tree_opt.hpp"

namespace strikeaudit::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw SchemaError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

// One feature name per line; blank lines and lines starting with '#' are
// ignored.
std::vector<std::string> read_catalog(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    names.push_back(line.substr(first, last - first + 1));
  }
  return names;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

template <typename Writer>
void write_with(const fs::path& path, Writer&& writer) {
  std::ostringstream buf;
  writer(buf);
  write_text(path, buf.str());
}

// Flag values for one subcommand. Each bound flag records how it overrides
// the configuration assembled from defaults and an optional --config file.
struct Options {
  AuditConfig flags;
  std::string input;
  std::string catalog_path;
  std::string config_path;
  std::string out_dir = ".";
  std::string missing = "as_no";
  double ridge = 0.0;
  std::vector<std::pair<CLI::Option*, std::function<void(AuditConfig&)>>> overrides;

  template <typename T>
  CLI::Option* bind(CLI::App* app, const std::string& name, T& var, const std::string& help,
                    std::function<void(AuditConfig&)> apply) {
    CLI::Option* opt = app->add_option(name, var, help)->capture_default_str();
    overrides.emplace_back(opt, std::move(apply));
    return opt;
  }

  AuditConfig resolve() const {
    AuditConfig cfg;
    if (!config_path.empty()) audit_config_from_json(read_json(config_path), cfg);
    for (const auto& [opt, apply] : overrides) {
      if (opt->count() > 0) apply(cfg);
    }
    if (cfg.input.empty()) throw ArgumentError("an input CSV is required (--input)");
    return cfg;
  }
};

void add_input_flags(CLI::App* app, Options& o) {
  o.bind(app, "--input", o.input, "Juror CSV file",
         [&o](AuditConfig& c) { c.input = o.input; });
  o.bind(app, "--catalog", o.catalog_path,
         "File listing feature columns, one per line (default: every non-required column)",
         [&o](AuditConfig& c) { c.catalog = read_catalog(o.catalog_path); });
  o.bind(app, "--missing", o.missing, "Missing-answer policy",
         [&o](AuditConfig& c) {
           c.missing = o.missing == "drop_row" ? MissingPolicy::kDropRow : MissingPolicy::kAsNo;
         })
      ->check(CLI::IsMember({"as_no", "drop_row"}));
  app->add_option("--config", o.config_path,
                  "JSON configuration file; explicit flags override its values");
  app->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
}

void add_seed_flags(CLI::App* app, Options& o) {
  o.bind(app, "--seed", o.flags.seed, "Seed for every random choice",
         [&o](AuditConfig& c) { c.seed = o.flags.seed; });
  o.bind(app, "--threads", o.flags.threads, "Worker threads for subset search and tree restarts",
         [&o](AuditConfig& c) { c.threads = o.flags.threads; })
      ->check(CLI::PositiveNumber);
  o.bind(app, "--train-fraction", o.flags.train_fraction, "Share of rows used for training",
         [&o](AuditConfig& c) { c.train_fraction = o.flags.train_fraction; });
  o.bind(app, "--folds", o.flags.folds, "Cross-validation folds",
         [&o](AuditConfig& c) { c.folds = o.flags.folds; });
}

void add_subset_flags(CLI::App* app, Options& o) {
  o.bind(app, "--k-max", o.flags.k_max, "Largest subset size (clamped to the column count)",
         [&o](AuditConfig& c) { c.k_max = o.flags.k_max; });
  o.bind(app, "--ridge", o.ridge, "Ridge penalty on coefficients",
         [&o](AuditConfig& c) { c.ridge = o.ridge; })
      ->default_str("1/n, n = training rows");
  o.bind(app, "--node-budget", o.flags.node_budget,
         "Branch-and-bound node limit per subset size",
         [&o](AuditConfig& c) { c.node_budget = o.flags.node_budget; });
}

void add_tree_flags(CLI::App* app, Options& o) {
  o.bind(app, "--max-depth", o.flags.tree.max_depth, "Maximum tree depth",
         [&o](AuditConfig& c) { c.tree.max_depth = o.flags.tree.max_depth; });
  o.bind(app, "--min-leaf", o.flags.tree.min_leaf, "Minimum training rows per leaf",
         [&o](AuditConfig& c) { c.tree.min_leaf = o.flags.tree.min_leaf; });
  o.bind(app, "--restarts", o.flags.tree.restarts, "Random restarts of the tree search",
         [&o](AuditConfig& c) { c.tree.restarts = o.flags.tree.restarts; });
  o.bind(app, "--alpha-grid", o.flags.alpha_grid,
         "Per-leaf penalties tried by cross-validation",
         [&o](AuditConfig& c) { c.alpha_grid = o.flags.alpha_grid; })
      ->delimiter(',');
}

void add_alpha_level_flag(CLI::App* app, Options& o) {
  o.bind(app, "--alpha-level", o.flags.alpha_level,
         "Significance level for Holm-adjusted p-values",
         [&o](AuditConfig& c) { c.alpha_level = o.flags.alpha_level; });
}

struct Prepared {
  JurorTable eligible;
  FeatureMatrix matrix;
};

Prepared prepare(const AuditConfig& cfg) {
  Prepared p;
  p.eligible = filter_eligible(load_csv(cfg.input, cfg.catalog));
  if (p.eligible.empty()) throw DegenerateDataError("no strike-eligible records");
  p.matrix = build_matrix(p.eligible, cfg.missing);
  return p;
}

FitSettings fit_settings(const AuditConfig& cfg, std::size_t train_rows) {
  FitSettings s = FitSettings::for_rows(train_rows);
  if (cfg.ridge) {
    if (!(*cfg.ridge >= 0.0)) throw ArgumentError("ridge must be non-negative");
    s.ridge = *cfg.ridge;
  }
  return s;
}

std::string names_of(const std::vector<std::size_t>& support,
                     const std::vector<std::string>& columns) {
  std::string out;
  for (std::size_t j : support) out += (out.empty() ? "" : " ") + columns[j];
  return out.empty() ? "(none)" : out;
}

void write_tree_files(const fs::path& dir, const Tree& tree) {
  write_text(dir / "tree.json", dump_json(tree_to_json(tree)));
  write_text(dir / "tree.txt", render_rules(tree));
  write_text(dir / "tree.dot", render_dot(tree));
}

void write_findings_csv(const fs::path& dir, const std::vector<DisparityFinding>& findings) {
  write_with(dir / "disparity.csv", [&](std::ostream& s) { write_disparity_csv(findings, s); });
}

void print_findings(const std::vector<DisparityFinding>& findings, std::ostream& out) {
  for (const DisparityFinding& f : findings) {
    out << "leaf " << f.leaf << ": black " << f.struck_black << "/" << f.n_black
        << ", non-black " << f.struck_nonblack << "/" << f.n_nonblack;
    if (f.skipped) {
      out << ", skipped (" << f.reason << ")\n";
    } else {
      out << ", p_adjusted " << format_number(*f.p_adjusted)
          << (f.significant ? " significant" : "") << "\n";
    }
  }
}

int cmd_synth(const std::string& config_path, const std::optional<std::size_t>& n,
              std::uint64_t seed, const std::string& output, std::ostream& out) {
  SynthConfig cfg = synth_config_from_json(read_json(config_path));
  if (n) cfg.n = *n;
  const JurorTable table = synth_generate(cfg, seed);
  write_csv(table, fs::path(output));
  out << "wrote " << table.size() << " records to " << output << "\n";
  return kExitOk;
}

int cmd_ofs(const Options& o, std::ostream& out) {
  const AuditConfig cfg = o.resolve();
  const Prepared p = prepare(cfg);
  const SplitResult parts = split(p.matrix, cfg.train_fraction, cfg.seed);
  const FitSettings s = fit_settings(cfg, parts.train.rows());
  const SubsetPath path =
      subset_path(parts.train, parts.test, std::min(cfg.k_max, parts.train.cols()), cfg.folds,
                  cfg.seed, s, {cfg.threads, cfg.node_budget});
  const ImportanceProfile profile = importance_profile(path);
  const fs::path dir = o.out_dir;
  write_with(dir / "ofs_curve.csv", [&](std::ostream& f) { write_curve_csv(path, f); });
  write_with(dir / "importance.csv", [&](std::ostream& f) { write_importance_csv(profile, f); });
  write_text(dir / "ofs.json", dump_json(subset_path_to_json(path)));
  out << "chosen k " << path.chosen_k << ", cv AUC " << format_number(path.chosen().cv_auc_mean)
      << ", test AUC " << format_number(path.test_auc) << "\nsupport "
      << names_of(path.chosen().support, path.columns) << "\n";
  return kExitOk;
}

int cmd_stepwise(const Options& o, const std::vector<double>& thresholds, std::ostream& out) {
  const AuditConfig cfg = o.resolve();
  const Prepared p = prepare(cfg);
  const LogisticModel model = backward_stepwise(p.matrix, thresholds);
  const WaldResult wald = wald_pvalues(model, p.matrix);
  json pvals = json::object();
  for (const auto& [name, pv] : wald.p_values) pvals[name] = pv;
  const json doc = {{"thresholds", thresholds},
                    {"model", model_to_json(model, p.matrix.columns)},
                    {"p_values", pvals}};
  write_text(fs::path(o.out_dir) / "stepwise.json", dump_json(doc));
  for (const auto& [name, pv] : wald.p_values) {
    out << name << "  p = " << format_number(pv) << "\n";
  }
  return kExitOk;
}

int cmd_tree(const Options& o, const CLI::Option* alpha_opt, double alpha, std::ostream& out) {
  AuditConfig cfg = o.resolve();
  const Prepared p = prepare(cfg);
  const SplitResult parts = split(p.matrix, cfg.train_fraction, cfg.seed);
  const FeatureMatrix train = parts.train.without_race_columns();
  TreeSettings ts = cfg.tree;
  ts.seed = cfg.seed;
  ts.threads = cfg.threads;
  Tree tree;
  if (alpha_opt->count() > 0) {
    ts.alpha = alpha;
    tree = fit_tree(train, ts);
  } else {
    const AlphaTuning tuning = tune_alpha(train, cfg.alpha_grid, cfg.folds, cfg.seed, ts);
    ts.alpha = tuning.alpha;
    tree = tuning.tree;
    for (std::size_t i = 0; i < cfg.alpha_grid.size(); ++i) {
      out << "alpha " << format_number(cfg.alpha_grid[i]) << "  cv error "
          << format_number(tuning.cv_error[i]) << "\n";
    }
  }
  write_tree_files(o.out_dir, tree);
  out << "alpha " << format_number(ts.alpha) << ", " << tree.leaf_count() << " leaves\n"
      << render_rules(tree);
  return kExitOk;
}

int cmd_disparity(const Options& o, const std::string& tree_path, std::ostream& out) {
  const AuditConfig cfg = o.resolve();
  const JurorTable eligible = filter_eligible(load_csv(cfg.input, cfg.catalog));
  const Tree tree = tree_from_json(read_json(tree_path));
  const auto findings = leaf_disparity(tree, eligible, cfg.alpha_level);
  write_findings_csv(o.out_dir, findings);
  print_findings(findings, out);
  return kExitOk;
}

int cmd_ablate(const Options& o, std::ostream& out) {
  const AuditConfig cfg = o.resolve();
  const Prepared p = prepare(cfg);
  const SplitResult parts = split(p.matrix, cfg.train_fraction, cfg.seed);
  const AblationResult r =
      ablation_auc(parts.train, parts.test, cfg.k_max, cfg.folds, cfg.seed,
                   fit_settings(cfg, parts.train.rows()), {cfg.threads, cfg.node_budget});
  const json doc = {{"auc_full", r.auc_full},
                    {"auc_ablated", r.auc_ablated},
                    {"chosen_k_full", r.full.chosen_k},
                    {"chosen_k_ablated", r.ablated.chosen_k}};
  write_text(fs::path(o.out_dir) / "ablation.json", dump_json(doc));
  out << "test AUC with race columns " << format_number(r.auc_full) << ", without "
      << format_number(r.auc_ablated) << "\n";
  return kExitOk;
}

void write_report_files(const fs::path& dir, const AuditReport& report) {
  write_with(dir / "ofs_curve.csv",
             [&](std::ostream& f) { write_curve_csv(report.subset_path, f); });
  write_with(dir / "importance.csv",
             [&](std::ostream& f) { write_importance_csv(report.importance, f); });
  write_tree_files(dir, report.tree);
  write_findings_csv(dir, report.findings);
}

int cmd_audit(const Options& o, std::ostream& out) {
  const AuditConfig cfg = o.resolve();
  const AuditReport report = run_audit(cfg);
  const fs::path dir = o.out_dir;
  write_text(dir / "report.json", dump_json(report_to_json(report)));
  write_report_files(dir, report);
  out << render_report_text(report);
  return kExitOk;
}

int cmd_report(const std::string& report_path, const std::string& out_dir,
               std::ostream& out) {
  const AuditReport report = report_from_json(read_json(report_path));
  if (!out_dir.empty()) write_report_files(out_dir, report);
  out << render_report_text(report);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Juror strike bias audit: optimal feature selection, optimal trees and "
               "per-segment disparity tests",
               "strikeaudit"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  std::function<int()> action;

  // synth
  std::string synth_config;
  std::size_t synth_n = 0;
  std::uint64_t synth_seed = 0;
  std::string synth_output = "synthetic.csv";
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic juror CSV");
  synth->add_option("--config", synth_config, "Synthetic population JSON")->required();
  CLI::Option* synth_n_opt =
      synth->add_option("--n", synth_n, "Number of jurors")->default_str("value in --config");
  synth->add_option("--seed", synth_seed, "Random seed")->capture_default_str();
  synth->add_option("--output", synth_output, "CSV file to write")->capture_default_str();
  synth->callback([&] {
    action = [&] {
      std::optional<std::size_t> n;
      if (synth_n_opt->count() > 0) n = synth_n;
      return cmd_synth(synth_config, n, synth_seed, synth_output, out);
    };
  });

  // ofs
  Options ofs_o;
  CLI::App* ofs = app.add_subcommand(
      "ofs", "Cross-validated best-subset path; writes ofs_curve.csv, importance.csv, ofs.json");
  add_input_flags(ofs, ofs_o);
  add_seed_flags(ofs, ofs_o);
  add_subset_flags(ofs, ofs_o);
  ofs->callback([&] { action = [&] { return cmd_ofs(ofs_o, out); }; });

  // stepwise
  Options step_o;
  std::vector<double> thresholds = {0.1, 0.05};
  CLI::App* step = app.add_subcommand(
      "stepwise", "Backward elimination by Wald p-value on all eligible rows; writes "
                  "stepwise.json");
  add_input_flags(step, step_o);
  step->add_option("--thresholds", thresholds, "Successive p-value cutoffs")
      ->delimiter(',')
      ->capture_default_str();
  step->callback([&] { action = [&] { return cmd_stepwise(step_o, thresholds, out); }; });

  // tree
  Options tree_o;
  double tree_alpha = TreeSettings{}.alpha;
  CLI::App* tree = app.add_subcommand(
      "tree", "Fit an optimal tree on the training split without race columns; writes "
              "tree.json, tree.txt, tree.dot");
  add_input_flags(tree, tree_o);
  add_seed_flags(tree, tree_o);
  add_tree_flags(tree, tree_o);
  CLI::Option* alpha_opt =
      tree->add_option("--alpha", tree_alpha,
                       "Fixed per-leaf penalty; skips cross-validated tuning")
          ->default_str("tuned over --alpha-grid");
  tree->callback([&] { action = [&] { return cmd_tree(tree_o, alpha_opt, tree_alpha, out); }; });

  // disparity
  Options disp_o;
  std::string disp_tree;
  CLI::App* disp = app.add_subcommand(
      "disparity", "Per-leaf Fisher tests with Holm correction; writes disparity.csv");
  add_input_flags(disp, disp_o);
  add_alpha_level_flag(disp, disp_o);
  disp->add_option("--tree", disp_tree, "tree.json produced by the tree subcommand")
      ->required();
  disp->callback([&] { action = [&] { return cmd_disparity(disp_o, disp_tree, out); }; });

  // ablate
  Options abl_o;
  CLI::App* abl = app.add_subcommand(
      "ablate", "Test AUC with and without race columns; writes ablation.json");
  add_input_flags(abl, abl_o);
  add_seed_flags(abl, abl_o);
  add_subset_flags(abl, abl_o);
  abl->callback([&] { action = [&] { return cmd_ablate(abl_o, out); }; });

  // audit
  Options audit_o;
  CLI::App* audit = app.add_subcommand(
      "audit", "Full pipeline; writes report.json, ofs_curve.csv, importance.csv, tree.json, "
               "tree.txt, tree.dot, disparity.csv");
  add_input_flags(audit, audit_o);
  add_seed_flags(audit, audit_o);
  add_subset_flags(audit, audit_o);
  add_tree_flags(audit, audit_o);
  add_alpha_level_flag(audit, audit_o);
  audit->callback([&] { action = [&] { return cmd_audit(audit_o, out); }; });

  // report
  std::string report_path;
  std::string report_out;
  CLI::App* report = app.add_subcommand(
      "report", "Print a report.json as text tables and optionally re-emit its plot files");
  report->add_option("--report", report_path, "report.json from the audit subcommand")
      ->required();
  report->add_option("--out", report_out,
                     "Directory for ofs_curve.csv, importance.csv, tree files and "
                     "disparity.csv")
      ->default_str("none; print only");
  report->callback([&] { action = [&] { return cmd_report(report_path, report_out, out); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action();
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace strikeaudit::cli
