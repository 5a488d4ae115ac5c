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

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "designs.hpp"
#include "strikeaudit/synth.hpp"

namespace strikeaudit {
namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

class Serialization : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    SynthConfig cfg = design::load_config("chain_node4.json");
    cfg.n = 1500;
    const JurorTable table = synth_generate(cfg, 11);
    AuditConfig audit;
    audit.input = "memory.csv";
    audit.seed = 11;
    audit.k_max = 6;
    audit.tree.restarts = 8;
    audit.alpha_grid = {0.005, 0.01};
    report_ = new AuditReport(run_audit(audit, table, "bytes"));
  }
  static void TearDownTestSuite() {
    delete report_;
    report_ = nullptr;
  }
  static AuditReport* report_;
};

AuditReport* Serialization::report_ = nullptr;

TEST_F(Serialization, ReportRoundTripIsByteStable) {
  const nlohmann::json doc = report_to_json(*report_);
  const AuditReport back = report_from_json(doc);
  EXPECT_EQ(report_to_json(back), doc);
  EXPECT_EQ(dump_json(report_to_json(back)), dump_json(doc));
  EXPECT_EQ(render_report_text(back), render_report_text(*report_));
  EXPECT_EQ(back.chosen_model().support, report_->chosen_model().support);
}

TEST_F(Serialization, ReportTopLevelKeys) {
  const nlohmann::json doc = report_to_json(*report_);
  for (const char* key : {"config", "provenance", "dropped_columns", "subset_path",
                          "chosen_model", "importance", "ablation", "tree_tuning", "tree",
                          "findings"}) {
    EXPECT_TRUE(doc.contains(key)) << key;
  }
  EXPECT_EQ(doc["provenance"]["dataset_sha256"], sha256_hex("bytes"));
  const std::string text = dump_json(doc);
  EXPECT_EQ(text.back(), '\n');
}

TEST_F(Serialization, TreeRoundTrip) {
  const Tree& tree = report_->tree;
  const Tree back = tree_from_json(tree_to_json(tree));
  ASSERT_EQ(back.nodes.size(), tree.nodes.size());
  EXPECT_EQ(back.feature_names, tree.feature_names);
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    EXPECT_EQ(back.nodes[i].feature, tree.nodes[i].feature);
    EXPECT_EQ(back.nodes[i].left, tree.nodes[i].left);
    EXPECT_EQ(back.nodes[i].right, tree.nodes[i].right);
    EXPECT_EQ(back.nodes[i].n, tree.nodes[i].n);
    EXPECT_EQ(back.nodes[i].n_struck, tree.nodes[i].n_struck);
    EXPECT_EQ(back.nodes[i].p_strike, tree.nodes[i].p_strike);
  }
  EXPECT_EQ(render_rules(back), render_rules(tree));
}

TEST_F(Serialization, ModelRoundTripIsExact) {
  const auto& columns = report_->subset_path.columns;
  for (const SubsetPathEntry& e : report_->subset_path.entries) {
    const LogisticModel back = model_from_json(model_to_json(e.model, columns), columns);
    EXPECT_EQ(back.support, e.model.support);
    ASSERT_EQ(back.beta.size(), e.model.beta.size());
    for (Eigen::Index j = 0; j < back.beta.size(); ++j) EXPECT_EQ(back.beta[j], e.model.beta[j]);
    EXPECT_EQ(back.intercept, e.model.intercept);
    EXPECT_EQ(back.ridge, e.model.ridge);
  }
  const std::vector<std::string> other = {"a", "b"};
  EXPECT_THROW(model_from_json(model_to_json(report_->chosen_model(), columns), other),
               SchemaError);
}

TEST_F(Serialization, FindingsRoundTripKeepsUnsetFields) {
  DisparityFinding skipped;
  skipped.leaf = 3;
  skipped.n_black = 4;
  skipped.struck_black = 2;
  skipped.rate_black = 0.5;
  skipped.skipped = true;
  skipped.reason = "degenerate margin";
  std::vector<DisparityFinding> all = report_->findings;
  all.push_back(skipped);
  const nlohmann::json doc = findings_to_json(all);
  EXPECT_TRUE(doc.back()["p_raw"].is_null());
  const auto back = findings_from_json(doc);
  EXPECT_EQ(findings_to_json(back), doc);
  EXPECT_FALSE(back.back().rate_nonblack.has_value());
  EXPECT_EQ(back.back().reason, "degenerate margin");
}

TEST_F(Serialization, SubsetPathAndImportanceRoundTrip) {
  const nlohmann::json path = subset_path_to_json(report_->subset_path);
  EXPECT_EQ(subset_path_to_json(subset_path_from_json(path)), path);
  const nlohmann::json imp = importance_to_json(report_->importance);
  EXPECT_EQ(importance_to_json(importance_from_json(imp)), imp);
}

TEST_F(Serialization, CsvExportsShape) {
  std::ostringstream curve;
  write_curve_csv(report_->subset_path, curve);
  auto lines = lines_of(curve.str());
  EXPECT_EQ(lines.front(), "k,cv_auc_mean,cv_auc_sd");
  EXPECT_EQ(lines.size(), report_->subset_path.entries.size() + 1);

  std::ostringstream importance;
  write_importance_csv(report_->importance, importance);
  lines = lines_of(importance.str());
  EXPECT_EQ(lines.front().rfind("k,is_black", 0), 0U);
  EXPECT_EQ(lines.size(), report_->importance.ks.size() + 1);

  std::ostringstream disparity;
  write_disparity_csv(report_->findings, disparity);
  lines = lines_of(disparity.str());
  EXPECT_EQ(lines.front().rfind("leaf,path,n_black", 0), 0U);
  EXPECT_EQ(lines.size(), report_->findings.size() + 1);
}

TEST(AuditConfigJson, OverlaysAndRejectsUnknownKeys) {
  AuditConfig cfg;
  cfg.k_max = 7;
  audit_config_from_json(
      nlohmann::json::parse(R"({"seed": 9, "tree": {"restarts": 5}, "missing": "drop_row"})"),
      cfg);
  EXPECT_EQ(cfg.seed, 9U);
  EXPECT_EQ(cfg.k_max, 7U);
  EXPECT_EQ(cfg.tree.restarts, 5U);
  EXPECT_EQ(cfg.missing, MissingPolicy::kDropRow);
  EXPECT_THROW(audit_config_from_json(nlohmann::json::parse(R"({"sede": 1})"), cfg),
               SchemaError);
  EXPECT_THROW(audit_config_from_json(nlohmann::json::parse(R"({"seed": "x"})"), cfg),
               SchemaError);
  EXPECT_THROW(audit_config_from_json(nlohmann::json::parse(R"({"missing": "maybe"})"), cfg),
               SchemaError);

  AuditConfig back;
  audit_config_from_json(audit_config_to_json(cfg), back);
  EXPECT_EQ(audit_config_to_json(back), audit_config_to_json(cfg));
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(-2.5), "-2.5");
  for (double v : {1.0 / 3.0, 2.718281828459045, 1e-300, 123456.789}) {
    EXPECT_EQ(std::stod(format_number(v)), v);
  }
}

TEST(SchemaErrors, MalformedDocuments) {
  EXPECT_THROW(tree_from_json(nlohmann::json::parse(R"({"root": 1})")), SchemaError);
  EXPECT_THROW(tree_from_json(nlohmann::json::parse(
                   R"({"feature_names": ["a"], "root": {"feature": "b", "n": 1, "n_struck": 0}})")),
               SchemaError);
  EXPECT_THROW(report_from_json(nlohmann::json::object()), SchemaError);
}

}  // namespace
}  // namespace strikeaudit
