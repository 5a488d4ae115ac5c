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

#include <cstdio>
#include <set>
#include <unordered_map>

#include "strikeaudit/errors.hpp"
#include "strikeaudit/random.hpp"

namespace strikeaudit {
namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

int parse_node(const nlohmann::json& j, std::vector<SynthNode>& nodes) {
  const int index = static_cast<int>(nodes.size());
  nodes.emplace_back();
  if (j.contains("leaf")) {
    nodes[index].leaf = j.at("leaf").get<std::string>();
    if (nodes[index].leaf.empty()) throw ArgumentError("leaf name must be non-empty");
    return index;
  }
  if (!j.contains("feature") || !j.contains("left") || !j.contains("right")) {
    throw ArgumentError("tree_spec node needs either 'leaf' or 'feature', 'left', 'right'");
  }
  nodes[index].feature = j.at("feature").get<std::string>();
  const int left = parse_node(j.at("left"), nodes);
  const int right = parse_node(j.at("right"), nodes);
  nodes[index].left = left;
  nodes[index].right = right;
  return index;
}

nlohmann::json node_to_json(const std::vector<SynthNode>& nodes, int index) {
  const SynthNode& node = nodes[static_cast<std::size_t>(index)];
  if (node.is_leaf()) return {{"leaf", node.leaf}};
  return {{"feature", node.feature},
          {"left", node_to_json(nodes, node.left)},
          {"right", node_to_json(nodes, node.right)}};
}

void collect_leaves(const std::vector<SynthNode>& nodes, int index,
                    std::vector<std::string>& out) {
  const SynthNode& node = nodes[static_cast<std::size_t>(index)];
  if (node.is_leaf()) {
    out.push_back(node.leaf);
    return;
  }
  collect_leaves(nodes, node.left, out);
  collect_leaves(nodes, node.right, out);
}

}  // namespace

void SynthConfig::validate() const {
  if (!is_probability(black_fraction)) {
    throw ArgumentError("black_fraction must lie in [0, 1]");
  }
  std::set<std::string> catalog;
  for (const FeatureMarginal& f : features) {
    if (f.name.empty()) throw ArgumentError("feature name must be non-empty");
    if (!is_probability(f.p_black) || !is_probability(f.p_nonblack)) {
      throw ArgumentError("marginal of '" + f.name + "' outside [0, 1]");
    }
    for (const char* reserved : kRequiredColumns) {
      if (f.name == reserved) throw ArgumentError("feature '" + f.name + "' is reserved");
    }
    if (!catalog.insert(f.name).second) {
      throw ArgumentError("duplicate feature '" + f.name + "'");
    }
  }
  if (tree.empty()) throw ArgumentError("tree_spec is empty");
  for (const SynthNode& node : tree) {
    if (node.is_leaf()) continue;
    if (!catalog.contains(node.feature)) {
      throw ArgumentError("tree feature '" + node.feature + "' is not in the catalog");
    }
    const auto size = static_cast<int>(tree.size());
    if (node.left <= 0 || node.right <= 0 || node.left >= size || node.right >= size) {
      throw ArgumentError("tree_spec child index out of range");
    }
  }
  std::set<std::string> leaves;
  for (const std::string& leaf : leaf_names()) {
    if (!leaves.insert(leaf).second) throw ArgumentError("duplicate leaf '" + leaf + "'");
    auto it = leaf_rates.find(leaf);
    if (it == leaf_rates.end()) throw ArgumentError("no leaf_rates for '" + leaf + "'");
    if (!is_probability(it->second.black) || !is_probability(it->second.nonblack)) {
      throw ArgumentError("leaf_rates of '" + leaf + "' outside [0, 1]");
    }
  }
}

std::vector<std::string> SynthConfig::leaf_names() const {
  std::vector<std::string> out;
  if (!tree.empty()) collect_leaves(tree, 0, out);
  return out;
}

std::string synth_leaf_of(const SynthConfig& cfg, const JurorRecord& record) {
  int index = 0;
  for (;;) {
    const SynthNode& node = cfg.tree.at(static_cast<std::size_t>(index));
    if (node.is_leaf()) return node.leaf;
    auto it = record.answers.find(node.feature);
    const bool yes = it != record.answers.end() && it->second == Answer::kYes;
    index = yes ? node.right : node.left;
  }
}

JurorTable synth_generate(const SynthConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  JurorTable table;
  for (const FeatureMarginal& f : cfg.features) table.feature_catalog.push_back(f.name);
  table.records.reserve(cfg.n);

  Rng rng(seed);
  char id[32];
  for (std::size_t i = 0; i < cfg.n; ++i) {
    JurorRecord r;
    r.trial_id = "synthetic";
    std::snprintf(id, sizeof id, "j%07zu", i);
    r.juror_id = id;
    r.eligible = true;
    r.is_black = rng.bernoulli(cfg.black_fraction);
    for (const FeatureMarginal& f : cfg.features) {
      const bool yes = rng.bernoulli(r.is_black ? f.p_black : f.p_nonblack);
      r.answers.emplace(f.name, yes ? Answer::kYes : Answer::kNo);
    }
    const LeafRates& rates = cfg.leaf_rates.at(synth_leaf_of(cfg, r));
    r.struck_by_state = rng.bernoulli(r.is_black ? rates.black : rates.nonblack);
    table.records.push_back(std::move(r));
  }
  return table;
}

SynthConfig synth_config_from_json(const nlohmann::json& doc) {
  SynthConfig cfg;
  try {
    cfg.n = doc.value("n", std::size_t{0});
    cfg.black_fraction = doc.value("black_fraction", 0.5);
    for (const auto& f : doc.at("features")) {
      FeatureMarginal m;
      m.name = f.at("name").get<std::string>();
      if (f.contains("p")) {
        m.p_black = m.p_nonblack = f.at("p").get<double>();
      } else {
        m.p_black = f.at("p_black").get<double>();
        m.p_nonblack = f.at("p_nonblack").get<double>();
      }
      cfg.features.push_back(std::move(m));
    }
    parse_node(doc.at("tree_spec"), cfg.tree);
    for (const auto& [name, rates] : doc.at("leaf_rates").items()) {
      cfg.leaf_rates[name] = {rates.at("black").get<double>(),
                              rates.at("nonblack").get<double>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("invalid synthetic config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::json synth_config_to_json(const SynthConfig& cfg) {
  nlohmann::json features = nlohmann::json::array();
  for (const FeatureMarginal& f : cfg.features) {
    if (f.p_black == f.p_nonblack) {
      features.push_back({{"name", f.name}, {"p", f.p_black}});
    } else {
      features.push_back(
          {{"name", f.name}, {"p_black", f.p_black}, {"p_nonblack", f.p_nonblack}});
    }
  }
  nlohmann::json rates = nlohmann::json::object();
  for (const auto& [name, r] : cfg.leaf_rates) {
    rates[name] = {{"black", r.black}, {"nonblack", r.nonblack}};
  }
  return {{"n", cfg.n},
          {"black_fraction", cfg.black_fraction},
          {"features", features},
          {"tree_spec", cfg.tree.empty() ? nlohmann::json() : node_to_json(cfg.tree, 0)},
          {"leaf_rates", rates}};
}

}  // namespace strikeaudit
