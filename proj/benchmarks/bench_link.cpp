// Copyright 2026 The cts Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <benchmark/benchmark.h>

#include "cts/channels.hpp"
#include "cts/link.hpp"

namespace {

using namespace cts;

LabeledOperator random_op(Labels labels, std::uint64_t seed) {
  const auto n = total_dim(labels);
  const Matrix a = random_unitary(n, seed);
  return {std::move(labels), a};
}

// link of two operators sharing one label of dimension d, with d-dimensional
// private labels on each side.
void BM_LinkShared(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto a = random_op({{"a", d}, {"s", d}}, 1);
  const auto b = random_op({{"s", d}, {"b", d}}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(link(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LinkShared)->RangeMultiplier(2)->Range(2, 16)->Complexity();

void BM_LinkDisjoint(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto a = random_op({{"a", d}}, 1);
  const auto b = random_op({{"b", d}}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(link(a, b));
}
BENCHMARK(BM_LinkDisjoint)->RangeMultiplier(2)->Range(2, 32);

void BM_PartialTrace(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto a = random_op({{"a", d}, {"b", d}, {"c", 2}}, 3);
  const std::vector<std::string> over{"b"};
  for (auto _ : state) benchmark::DoNotOptimize(partial_trace(a, over));
}
BENCHMARK(BM_PartialTrace)->RangeMultiplier(2)->Range(2, 16);

void BM_PermuteLabels(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto a = random_op({{"a", d}, {"b", d}, {"c", 2}}, 4);
  const std::vector<std::string> order{"c", "a", "b"};
  for (auto _ : state) benchmark::DoNotOptimize(permute_labels(a, order));
}
BENCHMARK(BM_PermuteLabels)->RangeMultiplier(2)->Range(2, 16);

}  // namespace
