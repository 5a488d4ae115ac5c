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

#include <cstdint>
#include <numeric>
#include <vector>

#include <benchmark/benchmark.h>

#include "strikeaudit/dataset.hpp"
#include "strikeaudit/logreg.hpp"
#include "strikeaudit/subset_select.hpp"
#include "strikeaudit/synth.hpp"
#include "strikeaudit/tree_opt.hpp"

namespace strikeaudit {
namespace {

// Chain-shaped population with `extra` noise questions appended.
SynthConfig population(std::size_t n, std::size_t extra) {
  SynthConfig cfg;
  cfg.n = n;
  cfg.features = {{"accused", 0.15, 0.15},
                  {"know_def", 0.2, 0.2},
                  {"fam_accused", 0.45, 0.45},
                  {"death_hesitation", 0.3, 0.3}};
  for (std::size_t j = 0; j < extra; ++j) {
    const double p = 0.1 + 0.05 * static_cast<double>(j % 10);
    cfg.features.push_back({"q" + std::to_string(j), p, p});
  }
  cfg.tree = {{"accused", "", 1, 8}, {"know_def", "", 2, 7}, {"fam_accused", "", 3, 6},
              {"death_hesitation", "", 4, 5}, {"", "a", -1, -1}, {"", "b", -1, -1},
              {"", "c", -1, -1}, {"", "d", -1, -1}, {"", "e", -1, -1}};
  cfg.leaf_rates = {{"a", {0.17, 0.17}}, {"b", {1.0, 1.0}}, {"c", {0.56, 0.56}},
                    {"d", {0.65, 0.65}}, {"e", {0.93, 0.93}}};
  return cfg;
}

FeatureMatrix matrix(std::size_t n, std::size_t extra) {
  return build_matrix(synth_generate(population(n, extra), 1)).without_race_columns();
}

void BM_LogisticFit(benchmark::State& state) {
  const FeatureMatrix m = matrix(static_cast<std::size_t>(state.range(0)), 8);
  std::vector<std::size_t> support(m.cols());
  std::iota(support.begin(), support.end(), std::size_t{0});
  const FitSettings s = FitSettings::for_rows(m.rows());
  for (auto _ : state) benchmark::DoNotOptimize(fit(m, support, s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LogisticFit)->RangeMultiplier(4)->Range(1000, 64000)->Complexity();

void BM_BestSubset(benchmark::State& state) {
  const FeatureMatrix m = matrix(4000, static_cast<std::size_t>(state.range(0)));
  const BinaryDesign design(m);
  const FitSettings s = FitSettings::for_rows(m.rows());
  for (auto _ : state) {
    benchmark::DoNotOptimize(best_subset(design, 5, s, SubsetSearchOptions{}));
  }
}
BENCHMARK(BM_BestSubset)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_FitTree(benchmark::State& state) {
  const FeatureMatrix m = matrix(5000, static_cast<std::size_t>(state.range(0)));
  TreeSettings s;
  s.restarts = 20;
  for (auto _ : state) benchmark::DoNotOptimize(fit_tree(m, s));
}
BENCHMARK(BM_FitTree)->Arg(4)->Arg(12)->Arg(28)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace strikeaudit
