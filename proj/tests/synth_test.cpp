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

#include "strikeaudit/synth.hpp"

#include <gtest/gtest.h>

#include "designs.hpp"
#include "strikeaudit/errors.hpp"
#include "strikeaudit/stats.hpp"

namespace strikeaudit {
namespace {

struct LeafCounts {
  ContingencyTable table;
  std::int64_t n() const { return table.total(); }
  double black_rate() const { return double(table.a) / double(table.a + table.b); }
  double nonblack_rate() const { return double(table.c) / double(table.c + table.d); }
  double rate() const { return double(table.a + table.c) / double(n()); }
};

LeafCounts count_leaf(const SynthConfig& cfg, const JurorTable& t, const std::string& leaf) {
  LeafCounts c;
  for (const JurorRecord& r : t.records) {
    if (synth_leaf_of(cfg, r) != leaf) continue;
    if (r.is_black) {
      (r.struck_by_state ? c.table.a : c.table.b) += 1;
    } else {
      (r.struck_by_state ? c.table.c : c.table.d) += 1;
    }
  }
  return c;
}

TEST(SynthGenerate, PlantedNode4Rates) {
  SynthConfig cfg = design::load_config("chain_node4.json");
  cfg.n = 100'000;
  const JurorTable t = synth_generate(cfg, 1);
  const LeafCounts c = count_leaf(cfg, t, "node4");
  EXPECT_GT(c.n(), 10'000);
  EXPECT_NEAR(c.black_rate(), 0.85, 0.02);
  EXPECT_NEAR(c.nonblack_rate(), 0.20, 0.02);
}

TEST(SynthGenerate, EqualRatesIgnoreRaceMix) {
  for (double fraction : {0.1, 0.5, 0.9}) {
    SynthConfig cfg = design::load_config("chain_null.json");
    cfg.n = 50'000;
    cfg.black_fraction = fraction;
    const JurorTable t = synth_generate(cfg, 2);
    EXPECT_NEAR(count_leaf(cfg, t, "node9").rate(), 0.17, 0.02) << fraction;
  }
}

TEST(SynthGenerate, EmptyPopulation) {
  SynthConfig cfg = design::load_config("chain_null.json");
  cfg.n = 0;
  const JurorTable t = synth_generate(cfg, 3);
  EXPECT_TRUE(t.empty());
  EXPECT_EQ(t.feature_catalog.size(), cfg.features.size());
}

TEST(SynthGenerate, DeterministicAndEligible) {
  SynthConfig cfg = design::load_config("chain_null.json");
  cfg.n = 500;
  const JurorTable a = synth_generate(cfg, 4);
  EXPECT_EQ(a, synth_generate(cfg, 4));
  EXPECT_NE(a, synth_generate(cfg, 5));
  for (const JurorRecord& r : a.records) EXPECT_TRUE(r.eligible);
}

TEST(SynthGenerate, BlackFractionAndMarginals) {
  SynthConfig cfg = design::load_config("chain_null.json");
  cfg.n = 40'000;
  cfg.black_fraction = 0.3;
  cfg.features[0] = {"accused", 0.4, 0.1};
  const JurorTable t = synth_generate(cfg, 6);
  double black = 0, acc_b = 0, acc_nb = 0;
  for (const JurorRecord& r : t.records) {
    const bool yes = r.answers.at("accused") == Answer::kYes;
    if (r.is_black) {
      ++black;
      acc_b += yes;
    } else {
      acc_nb += yes;
    }
  }
  EXPECT_NEAR(black / 40'000, 0.3, 0.01);
  EXPECT_NEAR(acc_b / black, 0.4, 0.02);
  EXPECT_NEAR(acc_nb / (40'000 - black), 0.1, 0.01);
}

// Equal rates for both races: per-leaf Fisher p-values behave like a valid
// test, rejecting at about the nominal rate.
TEST(SynthGenerate, NullLeafTestsAreCalibrated) {
  SynthConfig cfg = design::load_config("chain_null.json");
  cfg.n = 2000;
  int significant = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const JurorTable t = synth_generate(cfg, 1000 + seed);
    const auto p = fisher_exact(count_leaf(cfg, t, "node6").table);
    ASSERT_TRUE(p.has_value());
    if (*p < 0.05) ++significant;
  }
  EXPECT_LE(significant, 10);
}

TEST(SynthConfigJson, RoundTrip) {
  const SynthConfig cfg = design::load_config("chain_node4.json");
  const SynthConfig back = synth_config_from_json(synth_config_to_json(cfg));
  EXPECT_EQ(synth_config_to_json(back), synth_config_to_json(cfg));
  EXPECT_EQ(back.leaf_names(),
            (std::vector<std::string>{"node9", "node8", "node6", "node4", "node2"}));
}

TEST(SynthConfigJson, Invalid) {
  nlohmann::json doc = synth_config_to_json(design::load_config("chain_null.json"));
  nlohmann::json bad = doc;
  bad["leaf_rates"].erase("node2");
  EXPECT_THROW(synth_config_from_json(bad), ArgumentError);
  bad = doc;
  bad["black_fraction"] = 1.5;
  EXPECT_THROW(synth_config_from_json(bad), ArgumentError);
  bad = doc;
  bad["tree_spec"]["feature"] = "unknown";
  EXPECT_THROW(synth_config_from_json(bad), ArgumentError);
  bad = doc;
  bad.erase("features");
  EXPECT_THROW(synth_config_from_json(bad), ArgumentError);
}

}  // namespace
}  // namespace strikeaudit
