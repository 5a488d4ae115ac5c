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

#ifndef STRIKEAUDIT_RANDOM_HPP_
#define STRIKEAUDIT_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace strikeaudit {

// Seeded generator with distribution mappings spelled out here rather than
// taken from <random>, whose distributions are implementation-defined. Every
// stochastic routine in the library draws from this type so outputs are
// identical across standard libraries for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Mixes a base seed with a stream index (splitmix64 finalizer) so parallel
// work items get independent, schedule-free generators.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace strikeaudit

#endif  // STRIKEAUDIT_RANDOM_HPP_
