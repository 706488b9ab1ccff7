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


#include <catch2/catch_amalgamated.hpp>
#include <numeric>
#include <random>

#include "corpus.hpp"
#include "cts/link.hpp"
#include "cts/protocols.hpp"
#include "oracles.hpp"

using namespace cts;
using corpus::random_operator;

namespace {

oracle::Op as_oracle(const LabeledOperator& a) {
  oracle::Op o{{}, a.data()};
  for (const auto& l : a.labels()) o.spaces.push_back({l.name, l.dim});
  return o;
}

std::vector<oracle::Spaces> factor_spaces(const FactorNetwork& n) {
  std::vector<oracle::Spaces> out;
  for (const auto& f : n.factors()) out.push_back(as_oracle(f).spaces);
  return out;
}

LabeledOperator basis_projector(const std::string& name, std::size_t d, std::size_t k) {
  Matrix m = Matrix::Zero(d, d);
  m(k, k) = 1.0;
  return {{{name, d}}, m};
}

// Random labels for operand pairs with partial overlap: private labels on
// each side plus one or two shared ones.
std::pair<LabeledOperator, LabeledOperator> overlapping_pair(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto dim = [&] { return std::size_t{1} + rng() % 3; };
  Labels a{{"a", dim()}, {"s", dim()}}, b{{"s", a[1].dim}, {"b", dim()}};
  if (rng() % 2) {
    const auto t = dim();
    a.push_back({"t", t});
    b.insert(b.begin(), {"t", t});
  }
  std::shuffle(a.begin(), a.end(), rng);
  std::shuffle(b.begin(), b.end(), rng);
  return {random_operator(a, seed * 2 + 1), random_operator(b, seed * 2 + 2)};
}

}  // namespace

TEST_CASE("link of disjoint operators is the tensor product", "[linkprod]") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto rho = random_state(2, s, "A");
    const auto sigma = random_state(3, s + 1, "B");
    const auto l = link(rho, sigma);
    CHECK(l.labels() == Labels{{"A", 2}, {"B", 3}});
    CHECK((l.data() - tensor_product(rho, sigma).data()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("link with the identity channel moves the state", "[linkprod]") {
  const auto rho = random_state(2, 3, "A");
  const auto l = link(rho, unnormalized_me_vector_op(2, "A", "B"));
  CHECK(max_abs_diff(l, relabel(rho, {{"A", "B"}})) < 1e-15);
}

TEST_CASE("link on identical labels is the Born rule", "[linkprod]") {
  const auto zero = basis_projector("A", 2, 0), one = basis_projector("A", 2, 1);
  CHECK(link(zero, zero).is_scalar());
  CHECK(std::abs(link(zero, zero).value() - 1.0) < 1e-15);
  CHECK(std::abs(link(zero, one).value()) < 1e-15);
  const auto a = random_operator({{"A", 2}, {"B", 3}}, 1);
  const auto b = random_operator({{"B", 3}, {"A", 2}}, 2);
  const Matrix bt = permute_labels(b, std::vector<std::string>{"A", "B"}).data();
  CHECK(std::abs(link(a, b).value() - (a.data().transpose() * bt).trace()) < 1e-12);
}

TEST_CASE("link rejects mismatched shared dimensions", "[linkprod]") {
  CHECK_THROWS_AS(link(random_operator({{"A", 2}}, 1), random_operator({{"A", 3}}, 2)),
                  DimMismatch);
}

TEST_CASE("link matches the dense oracle", "[linkprod]") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto [a, b] = overlapping_pair(s);
    const auto l = link(a, b);
    const auto expected = oracle::link(as_oracle(a), as_oracle(b));
    REQUIRE(l.labels().size() == expected.spaces.size());
    for (std::size_t k = 0; k < expected.spaces.size(); ++k)
      CHECK(l.labels()[k].name == expected.spaces[k].name);
    CHECK((l.data() - expected.data).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("link is commutative", "[linkprod][property]") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto [a, b] = overlapping_pair(s);
    CHECK(max_abs_diff(canonicalize(link(a, b)), canonicalize(link(b, a))) < 1e-12);
  }
}

TEST_CASE("link is associative", "[linkprod][property]") {
  std::mt19937_64 rng(77);
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto dim = [&] { return std::size_t{1} + rng() % 3; };
    const auto ds = dim(), dt = dim();
    const auto a = random_operator({{"a", dim()}, {"s", ds}}, 3 * s);
    const auto b = random_operator({{"t", dt}, {"s", ds}}, 3 * s + 1);
    const auto c = random_operator({{"c", dim()}, {"t", dt}}, 3 * s + 2);
    const auto left = link(link(a, b), c);
    const auto right = link(a, link(b, c));
    CHECK(max_abs_diff(left, right) < 1e-10);
  }
}

TEST_CASE("link reproduces channel application", "[linkprod][property]") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const std::size_t d_in = 1 + s % 3, d_out = 1 + (s / 3) % 3;
    const auto c = random_cptp(d_in, d_out, s);
    const auto rho = random_state(d_in, s + 9, "in");
    CHECK(max_abs_diff(link(rho, c.op()), apply_channel(c, rho)) < 1e-12);
  }
}

TEST_CASE("two-factor contraction is the link product", "[linkprod]") {
  const auto [a, b] = overlapping_pair(4);
  const FactorNetwork n({a, b});
  const auto plan = plan_contraction(n);
  REQUIRE(plan.steps.size() == 1);
  CHECK(plan.steps[0].lhs == 0);
  CHECK(plan.steps[0].rhs == 1);
  CHECK(max_abs_diff(contract(n), link(a, b)) < 1e-15);
}

TEST_CASE("identity-channel chain transmits the state", "[linkprod]") {
  const Vector psi = random_pure_state(2, 3);
  const FactorNetwork n({LabeledOperator::projector({{"A", 2}}, psi),
                         unnormalized_me_vector_op(2, "A", "B"),
                         unnormalized_me_vector_op(2, "B", "C"),
                         povm_element(psi * psi.adjoint(), {{"C", 2}}).op()});
  const auto v = contract(n);
  REQUIRE(v.is_scalar());
  CHECK(std::abs(v.value() - 1.0) < 1e-12);
}

TEST_CASE("label multiplicity is capped at two", "[linkprod]") {
  const auto a = random_operator({{"A", 2}}, 1);
  FactorNetwork n({a, a, a});
  CHECK_THROWS_AS(n.validate(), MalformedNetwork);
  CHECK_THROWS_AS(contract(n), MalformedNetwork);
  CHECK_THROWS_AS(plan_contraction(n), MalformedNetwork);
  FactorNetwork mismatch({a, random_operator({{"A", 3}}, 2)});
  CHECK_THROWS_AS(mismatch.validate(), DimMismatch);
}

TEST_CASE("one-party teleportation network is a quarter of the direct value", "[linkprod]") {
  const auto w = corpus::state(5);
  const auto spec = corpus::spec(w, {PartyMode::PastPostSelect}, 5);
  const std::vector<std::size_t> branch{0};
  for (std::size_t k = 0; k < spec.instruments[0].size(); ++k) {
    const std::vector<std::size_t> outcome{k};
    const auto net = protocol_network(w, spec, outcome, branch);
    const auto value = contract(net).value();
    const auto direct =
        oracle::born(as_oracle(w.op()), {as_oracle(spec.instruments[0][k].op())});
    CHECK(std::abs(value - 0.25 * direct) < 1e-12);
  }
}

TEST_CASE("star networks merge hub and leaves", "[linkprod]") {
  const auto hub = random_operator({{"a", 2}, {"b", 2}, {"c", 2}}, 1);
  const FactorNetwork n({hub, random_operator({{"a", 2}, {"xa", 2}}, 2),
                         random_operator({{"b", 2}, {"xb", 2}}, 3),
                         random_operator({{"c", 2}, {"xc", 2}}, 4)});
  const auto plan = plan_contraction(n);
  REQUIRE(plan.steps.size() == 3);
  for (const auto& step : plan.steps) CHECK_FALSE(step.shared.empty());
  CHECK(plan.peak_dim == oracle::optimal_peak(factor_spaces(n)));
}

TEST_CASE("greedy planning is deterministic", "[linkprod]") {
  const auto w = corpus::comb(2);
  const auto spec = corpus::spec(w, {PartyMode::FullPostSelect, PartyMode::FullPostSelect}, 2);
  const std::vector<std::size_t> zeros{0, 0};
  const auto net = protocol_network(w, spec, zeros, zeros);
  CHECK(plan_contraction(net).to_json() == plan_contraction(net).to_json());
}

TEST_CASE("full post-selection network on two qubit parties stays small", "[linkprod]") {
  const auto w = corpus::comb(1);
  const auto spec = corpus::spec(w, {PartyMode::FullPostSelect, PartyMode::FullPostSelect}, 1);
  const auto ext = build_w_ext(w, spec);
  // W_ext alone keeps every probe open, so only the closed network is small
  const auto ext_plan = plan_contraction(ext);
  CHECK(ext_plan.peak_dim >= oracle::optimal_peak(factor_spaces(ext)));

  const std::vector<std::size_t> zeros{0, 0};
  const auto net = protocol_network(w, spec, zeros, zeros);
  const auto plan = plan_contraction(net);
  const auto best = oracle::optimal_peak(factor_spaces(net));
  CHECK(plan.peak_dim <= 256);
  CHECK(plan.peak_dim >= best);
}

TEST_CASE("any contraction order gives the same value", "[linkprod][property]") {
  const auto w = corpus::comb(3);
  const auto spec =
      corpus::spec(w, {PartyMode::PastPostSelect, PartyMode::FuturePostSelect}, 3);
  const std::vector<std::size_t> outcome{1, 0}, branch{0, 0};
  const auto net = protocol_network(w, spec, outcome, branch);
  const auto greedy = contract(net);
  // Random orders merge a random pair of connected nodes (any pair once the
  // rest is disconnected); orders that would blow past 1024 are redrawn.
  auto spaces = factor_spaces(net);
  auto connected = [](const oracle::Spaces& a, const oracle::Spaces& b) {
    for (const auto& x : a)
      for (const auto& y : b)
        if (x.name == y.name) return true;
    return false;
  };
  std::mt19937_64 rng(5);
  int accepted = 0;
  for (int attempt = 0; attempt < 2000 && accepted < 20; ++attempt) {
    std::vector<std::size_t> live(net.size());
    std::iota(live.begin(), live.end(), 0);
    std::vector<oracle::Spaces> shapes = spaces;
    std::vector<std::pair<std::size_t, std::size_t>> order;
    while (live.size() > 1) {
      std::vector<std::pair<std::size_t, std::size_t>> pairs, linked;
      for (std::size_t i = 0; i < live.size(); ++i)
        for (std::size_t j = i + 1; j < live.size(); ++j) {
          pairs.emplace_back(i, j);
          if (connected(shapes[live[i]], shapes[live[j]])) linked.emplace_back(i, j);
        }
      const auto& pool = linked.empty() ? pairs : linked;
      const auto [i, j] = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
      const auto lhs = live[i], rhs = live[j];
      order.emplace_back(lhs, rhs);
      oracle::Spaces merged;
      for (const auto& x : shapes[lhs])
        if (!connected({x}, shapes[rhs])) merged.push_back(x);
      for (const auto& y : shapes[rhs])
        if (!connected({y}, shapes[lhs])) merged.push_back(y);
      shapes.push_back(merged);
      live.erase(live.begin() + static_cast<std::ptrdiff_t>(j));
      live.erase(live.begin() + static_cast<std::ptrdiff_t>(i));
      live.push_back(shapes.size() - 1);
    }
    if (plan_from_order(net, order).peak_dim > 1024) continue;
    ++accepted;
    CHECK(max_abs_diff(contract(net, order), greedy) < 1e-9);
  }
  CHECK(accepted == 20);
  const std::vector<std::pair<std::size_t, std::size_t>> bad{{0, 0}};
  CHECK_THROWS_AS(contract(net, bad), MalformedNetwork);
  const std::vector<std::pair<std::size_t, std::size_t>> missing{{0, 99}};
  CHECK_THROWS_AS(plan_from_order(net, missing), MalformedNetwork);
}

TEST_CASE("peak cap", "[linkprod]") {
  const FactorNetwork n({random_operator({{"a", 4}}, 1), random_operator({{"b", 4}}, 2)});
  const auto plan = plan_contraction(n);
  CHECK(plan.peak_dim == 16);
  CHECK_NOTHROW(enforce_peak_cap(plan, 16));
  CHECK_THROWS_AS(enforce_peak_cap(plan, 15), ContractTooLarge);
  CHECK(plan.to_json().contains("steps"));
  CHECK(plan.to_json()["peak_dim"] == 16);
}

TEST_CASE("open labels and empty networks", "[linkprod]") {
  const FactorNetwork n({random_operator({{"a", 2}, {"s", 2}}, 1),
                         random_operator({{"s", 2}, {"b", 3}}, 2)});
  CHECK(n.open_labels() == Labels{{"a", 2}, {"b", 3}});
  const auto v = contract(FactorNetwork{});
  CHECK(std::abs(v.value() - 1.0) == 0.0);
}
