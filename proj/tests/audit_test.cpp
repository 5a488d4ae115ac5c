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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "designs.hpp"
#include "oracles.hpp"
#include "strikeaudit/serialization.hpp"
#include "strikeaudit/stats.hpp"
#include "strikeaudit/synth.hpp"

namespace strikeaudit {
namespace {

void add_jurors(JurorTable& t, std::map<std::string, Answer> answers, bool black, int struck,
                int total) {
  for (int i = 0; i < total; ++i) {
    JurorRecord r;
    r.trial_id = "t";
    r.juror_id = std::to_string(t.records.size());
    r.is_black = black;
    r.struck_by_state = i < struck;
    r.answers = answers;
    t.records.push_back(r);
  }
}

Tree one_split() {
  Tree t;
  t.feature_names = {"f"};
  t.nodes = {TreeNode{0, 1, 2}, TreeNode{}, TreeNode{}};
  return t;
}

TEST(LeafDisparity, IdenticalRatesAndSkippedLeaf) {
  JurorTable table;
  table.feature_catalog = {"f"};
  add_jurors(table, {{"f", Answer::kNo}}, true, 5, 10);
  add_jurors(table, {{"f", Answer::kNo}}, false, 10, 20);
  add_jurors(table, {{"f", Answer::kYes}}, true, 4, 9);
  const auto findings = leaf_disparity(one_split(), table, 0.05);
  ASSERT_EQ(findings.size(), 2U);

  EXPECT_EQ(findings[0].leaf, 1);
  EXPECT_EQ(*findings[0].p_raw, 1.0);
  EXPECT_FALSE(findings[0].significant);
  EXPECT_EQ(*findings[0].rate_black, 0.5);
  EXPECT_EQ(*findings[0].rate_nonblack, 0.5);

  EXPECT_EQ(findings[1].leaf, 2);
  EXPECT_TRUE(findings[1].skipped);
  EXPECT_EQ(findings[1].reason, "degenerate margin");
  EXPECT_FALSE(findings[1].p_raw.has_value());
  EXPECT_FALSE(findings[1].rate_nonblack.has_value());
  EXPECT_FALSE(findings[1].significant);
  // A family of one: adjusted equals raw.
  EXPECT_EQ(*findings[0].p_adjusted, *findings[0].p_raw);
}

TEST(LeafDisparity, MissingAnswersRouteAsNo) {
  JurorTable table;
  table.feature_catalog = {"f"};
  add_jurors(table, {{"f", Answer::kMissing}}, true, 1, 2);
  add_jurors(table, {{"f", Answer::kMissing}}, false, 1, 2);
  const auto findings = leaf_disparity(one_split(), table, 0.05);
  EXPECT_EQ(findings[0].n_black + findings[0].n_nonblack, 4);
}

TEST(LeafDisparity, Node4AnalogIsSignificantAfterHolm) {
  Tree tree;
  tree.feature_names = {"accused", "know_def", "fam_accused", "death_hesitation"};
  tree.nodes = {TreeNode{0, 1, 8}, TreeNode{1, 2, 7}, TreeNode{2, 3, 6}, TreeNode{3, 4, 5},
                TreeNode{},        TreeNode{},        TreeNode{},        TreeNode{},
                TreeNode{}};
  JurorTable table;
  table.feature_catalog = tree.feature_names;
  auto answers = [](int acc, int know, int fam, int death) {
    auto a = [](int v) { return v ? Answer::kYes : Answer::kNo; };
    return std::map<std::string, Answer>{{"accused", a(acc)},
                                         {"know_def", a(know)},
                                         {"fam_accused", a(fam)},
                                         {"death_hesitation", a(death)}};
  };
  add_jurors(table, answers(0, 1, 0, 0), true, 17, 20);   // node 4 analog
  add_jurors(table, answers(0, 1, 0, 0), false, 8, 40);
  add_jurors(table, answers(1, 0, 0, 0), true, 19, 20);   // others: equal rates
  add_jurors(table, answers(1, 0, 0, 0), false, 18, 20);
  add_jurors(table, answers(0, 0, 1, 0), true, 11, 20);
  add_jurors(table, answers(0, 0, 1, 0), false, 11, 20);
  add_jurors(table, answers(0, 0, 0, 1), true, 9, 10);
  add_jurors(table, answers(0, 0, 0, 1), false, 9, 10);
  add_jurors(table, answers(0, 0, 0, 0), true, 3, 20);
  add_jurors(table, answers(0, 0, 0, 0), false, 4, 20);

  const auto findings = leaf_disparity(tree, table, 0.05);
  ASSERT_EQ(findings.size(), 5U);
  const DisparityFinding& node4 = findings[3];
  ASSERT_EQ(node4.leaf, 7);
  EXPECT_EQ(*node4.rate_black, 0.85);
  EXPECT_EQ(*node4.rate_nonblack, 0.20);
  EXPECT_NEAR(*node4.p_raw, *oracle::fisher(17, 3, 8, 32), 1e-12);
  EXPECT_TRUE(node4.significant);
  EXPECT_EQ(describe_path(tree, 7)[1].to_string(), "know_def = yes");

  std::vector<double> raw;
  std::int64_t rows = 0;
  for (const auto& f : findings) {
    rows += f.n_black + f.n_nonblack;
    ASSERT_FALSE(f.skipped);
    raw.push_back(*f.p_raw);
    EXPECT_GE(*f.p_adjusted, *f.p_raw);
    if (f.leaf != 7) EXPECT_FALSE(f.significant);
  }
  EXPECT_EQ(rows, static_cast<std::int64_t>(table.size()));
  const auto adjusted = holm_adjust(raw);
  for (std::size_t i = 0; i < findings.size(); ++i) {
    EXPECT_EQ(*findings[i].p_adjusted, adjusted[i]);
  }
}

TEST(LeafDisparity, UnknownFeatureIsContractViolation) {
  JurorTable table;
  table.feature_catalog = {"g"};
  add_jurors(table, {{"g", Answer::kNo}}, true, 1, 2);
  EXPECT_THROW(leaf_disparity(one_split(), table, 0.05), ContractViolation);
  EXPECT_THROW(leaf_disparity(one_split(), table, 1.5), ArgumentError);
}

TEST(Ablation, NeedsRaceColumns) {
  const FeatureMatrix m = design::planted_logistic(300, 3, 1, 1.0, 0.0, 1);
  const SplitResult parts = split(m, 0.7, 1);
  EXPECT_THROW(ablation_auc(parts.train, parts.test, 3, 5, 1, FitSettings{}),
               ContractViolation);
}

TEST(Ablation, RaceOnlyOutcomeLosesSignal) {
  const JurorTable t = synth_generate(design::race_only(2000, 0.8, 0.2), 3);
  const FeatureMatrix m = build_matrix(t);
  const SplitResult parts = split(m, 0.7, 3);
  const AblationResult r = ablation_auc(parts.train, parts.test, 20, 5, 3,
                                        FitSettings::for_rows(parts.train.rows()));
  EXPECT_GE(r.auc_full, 0.70);
  EXPECT_LE(r.auc_ablated, 0.55);
  EXPECT_EQ(r.full.entries.size(), m.cols());
  EXPECT_EQ(r.ablated.entries.size(), m.cols() - 1);
}

class RunAudit : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / "strikeaudit_audit_test";
    std::filesystem::create_directories(dir_);
    SynthConfig cfg = design::load_config("chain_null.json");
    cfg.n = 1200;
    write_csv(synth_generate(cfg, 5), dir_ / "a.csv");
    config_.input = dir_ / "a.csv";
    config_.seed = 3;
    config_.tree.restarts = 10;
    config_.alpha_grid = {0.005, 0.02};
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::filesystem::path dir_;
  AuditConfig config_;
};

TEST_F(RunAudit, DeterministicReport) {
  const std::string a = dump_json(report_to_json(run_audit(config_)));
  const std::string b = dump_json(report_to_json(run_audit(config_)));
  EXPECT_EQ(a, b);
  AuditConfig threaded = config_;
  threaded.threads = 3;
  EXPECT_EQ(dump_json(report_to_json(run_audit(threaded))), a);
}

TEST_F(RunAudit, ReportInvariants) {
  const AuditReport r = run_audit(config_);
  EXPECT_EQ(r.findings.size(), r.tree.leaf_count());
  std::int64_t rows = 0;
  for (const auto& f : r.findings) rows += f.n_black + f.n_nonblack;
  EXPECT_EQ(rows, 1200);
  EXPECT_EQ(r.provenance.records, 1200U);
  EXPECT_EQ(r.provenance.train_rows + r.provenance.test_rows, 1200U);
  EXPECT_NEAR(r.provenance.ridge, 1.0 / static_cast<double>(r.provenance.train_rows), 1e-15);
  EXPECT_EQ(r.subset_path.entries.size(), r.subset_path.columns.size());
  for (const std::string& name : r.tree.feature_names) {
    EXPECT_NE(name, "is_black");
  }
  EXPECT_EQ(r.provenance.dataset_sha256.size(), 64U);
}

TEST_F(RunAudit, DigestTracksInputBytes) {
  const std::string first = run_audit(config_).provenance.dataset_sha256;
  EXPECT_EQ(run_audit(config_).provenance.dataset_sha256, first);
  // Same records, different bytes (CRLF line endings).
  std::ifstream in(config_.input, std::ios::binary);
  std::stringstream text;
  text << in.rdbuf();
  std::string crlf;
  for (char c : text.str()) {
    if (c == '\n') crlf += '\r';
    crlf += c;
  }
  std::ofstream(config_.input, std::ios::binary) << crlf;
  const AuditReport changed = run_audit(config_);
  EXPECT_NE(changed.provenance.dataset_sha256, first);
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_F(RunAudit, StageLabelledErrors) {
  AuditConfig missing = config_;
  missing.input = dir_ / "absent.csv";
  try {
    run_audit(missing);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "load");
  }
  AuditConfig bad_fraction = config_;
  bad_fraction.train_fraction = 1.5;
  try {
    run_audit(bad_fraction);
    FAIL();
  } catch (const ArgumentError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("split:", 0), 0U);
  }
  JurorTable none = load_csv(config_.input);
  for (auto& r : none.records) r.eligible = false;
  try {
    run_audit(config_, none, "x");
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "filter_eligible");
  }
}

}  // namespace
}  // namespace strikeaudit
