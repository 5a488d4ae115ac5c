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

#ifndef STRIKEAUDIT_SYNTH_HPP_
#define STRIKEAUDIT_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "strikeaudit/dataset.hpp"

namespace strikeaudit {

// Node of a ground-truth tree over named binary features. Internal nodes
// route answer "no" left and "yes" right; leaves carry a name that keys
// SynthConfig::leaf_rates.
struct SynthNode {
  std::string feature;  // empty for leaves
  std::string leaf;     // empty for internal nodes
  int left = -1;
  int right = -1;

  bool is_leaf() const { return feature.empty(); }
};

struct LeafRates {
  double black = 0.0;
  double nonblack = 0.0;
};

// Bernoulli probability of a "yes" answer, optionally depending on race.
struct FeatureMarginal {
  std::string name;
  double p_black = 0.0;
  double p_nonblack = 0.0;
};

struct SynthConfig {
  std::size_t n = 0;
  std::vector<SynthNode> tree;  // root at index 0
  std::map<std::string, LeafRates> leaf_rates;
  double black_fraction = 0.5;
  std::vector<FeatureMarginal> features;  // catalog order

  // Throws ArgumentError unless every invariant holds: probabilities in
  // [0, 1], tree features in the catalog, each leaf named once and given
  // rates.
  void validate() const;

  std::vector<std::string> leaf_names() const;  // preorder
};

// Leaf name reached by a record's answers (missing counts as "no").
std::string synth_leaf_of(const SynthConfig& cfg, const JurorRecord& record);

// Draws cfg.n jurors: race, then each feature in catalog order, then the
// struck flag from the reached leaf's race-specific rate. All records are
// eligible. Deterministic given the seed.
JurorTable synth_generate(const SynthConfig& cfg, std::uint64_t seed);

// JSON form:
//   {"n": 4000, "black_fraction": 0.5,
//    "features": [{"name": "accused", "p": 0.15},
//                 {"name": "same_race", "p_black": 0.8, "p_nonblack": 0.1}],
//    "tree_spec": {"feature": "accused", "left": {...}, "right": {"leaf": "n2"}},
//    "leaf_rates": {"n2": {"black": 0.93, "nonblack": 0.93}, ...}}
SynthConfig synth_config_from_json(const nlohmann::json& doc);
nlohmann::json synth_config_to_json(const SynthConfig& cfg);

}  // namespace strikeaudit

#endif  // STRIKEAUDIT_SYNTH_HPP_
