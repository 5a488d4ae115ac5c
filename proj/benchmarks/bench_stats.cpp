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

#include <vector>

#include <benchmark/benchmark.h>

#include "strikeaudit/random.hpp"
#include "strikeaudit/stats.hpp"

namespace strikeaudit {
namespace {

void BM_FisherExact(benchmark::State& state) {
  const auto n = state.range(0);
  const ContingencyTable table{n / 3, n / 6, n / 4, n - n / 3 - n / 6 - n / 4};
  for (auto _ : state) benchmark::DoNotOptimize(fisher_exact(table));
  state.SetComplexityN(n);
}
BENCHMARK(BM_FisherExact)->RangeMultiplier(4)->Range(64, 65536)->Complexity();

void BM_Auc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  std::vector<double> scores(n);
  std::vector<double> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = static_cast<double>(rng.below(100));
    labels[i] = rng.bernoulli(0.2 + 0.006 * scores[i]) ? 1.0 : 0.0;
  }
  labels[0] = 0.0;
  labels[1] = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(auc(scores, labels));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Auc)->RangeMultiplier(8)->Range(512, 1 << 18)->Complexity(benchmark::oNLogN);

void BM_Holm(benchmark::State& state) {
  Rng rng(2);
  std::vector<double> p(static_cast<std::size_t>(state.range(0)));
  for (double& v : p) v = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(holm_adjust(p));
}
BENCHMARK(BM_Holm)->Arg(5)->Arg(50)->Arg(5000);

}  // namespace
}  // namespace strikeaudit
