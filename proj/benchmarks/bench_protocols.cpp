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

#include "cts/link.hpp"
#include "cts/process.hpp"
#include "cts/protocols.hpp"

namespace {

using namespace cts;

ProcessMatrix comb() {
  return build_channel_comb(random_cptp(2, 2, 1, "A.O", "B.I"), random_state(2, 2).data());
}

ProtocolSpec spec(const ProcessMatrix& w, PartyMode a, PartyMode b) {
  ProtocolSpec s;
  s.layout = w.layout();
  s.modes = {a, b};
  s.instruments = {random_instrument(2, 2, 2, 3, "A.I", "A.O"),
                   random_instrument(2, 2, 2, 4, "B.I", "B.O")};
  return s;
}

PartyMode mode(std::int64_t k) { return static_cast<PartyMode>(k); }

void BM_PlanContraction(benchmark::State& state) {
  const auto w = comb();
  const auto s = spec(w, mode(state.range(0)), mode(state.range(0)));
  const std::vector<std::size_t> zeros{0, 0};
  const auto net = protocol_network(w, s, zeros, zeros);
  for (auto _ : state) benchmark::DoNotOptimize(plan_contraction(net));
  state.counters["peak_dim"] = double(plan_contraction(net).peak_dim);
  state.SetLabel(std::string(to_string(mode(state.range(0)))));
}
BENCHMARK(BM_PlanContraction)->DenseRange(0, 4);

void BM_ContractNetwork(benchmark::State& state) {
  const auto w = comb();
  const auto s = spec(w, mode(state.range(0)), mode(state.range(0)));
  const std::vector<std::size_t> zeros{0, 0};
  const auto net = protocol_network(w, s, zeros, zeros);
  const auto plan = plan_contraction(net);
  for (auto _ : state) benchmark::DoNotOptimize(contract(net, plan));
  state.SetLabel(std::string(to_string(mode(state.range(0)))));
}
BENCHMARK(BM_ContractNetwork)->DenseRange(0, 4);

void BM_RunProtocolSwitch(benchmark::State& state) {
  Matrix plus = Matrix::Constant(2, 2, Complex(0.5, 0.0));
  const auto w = build_quantum_switch(2, plus);
  ProtocolSpec s;
  s.layout = w.layout();
  s.modes = {PartyMode::FullPostSelect, PartyMode::FullPostSelect, PartyMode::Direct};
  s.instruments = {random_instrument(2, 2, 2, 1, "A.I", "A.O"),
                   random_instrument(2, 2, 2, 2, "B.I", "B.O"),
                   random_instrument(4, 1, 2, 3, "F.I", "F.O")};
  for (auto _ : state) benchmark::DoNotOptimize(run_protocol(w, s));
}
BENCHMARK(BM_RunProtocolSwitch)->Unit(benchmark::kMillisecond);

void BM_ValidateProcess(benchmark::State& state) {
  const auto w = comb();
  const auto modes_count = static_cast<std::size_t>(state.range(0));
  std::vector<PartyMode> modes(2, PartyMode::Direct);
  for (std::size_t k = 0; k < modes_count; ++k) modes[k] = PartyMode::PastPostSelect;
  const auto v = build_v(w, modes);
  for (auto _ : state) benchmark::DoNotOptimize(validate_process(v));
  state.counters["side"] = double(v.op().dim());
}
BENCHMARK(BM_ValidateProcess)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace
