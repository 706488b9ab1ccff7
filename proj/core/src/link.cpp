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

#include "cts/link.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

#include "index_maps.hpp"

namespace cts {

LabeledOperator link(const LabeledOperator& a, const LabeledOperator& b) {
  std::vector<std::size_t> a_open, a_shared, b_shared, b_open;
  std::vector<std::string> shared_names;
  for (std::size_t k = 0; k < a.labels().size(); ++k) {
    const auto& l = a.labels()[k];
    if (auto p = b.position(l.name)) {
      if (b.labels()[*p].dim != l.dim)
        throw DimMismatch("label '" + l.name + "' has dimension " +
                          std::to_string(l.dim) + " and " +
                          std::to_string(b.labels()[*p].dim));
      a_shared.push_back(k);
      b_shared.push_back(*p);
    } else {
      a_open.push_back(k);
    }
  }
  if (a_shared.empty()) return tensor_product(a, b);
  for (std::size_t k = 0; k < b.labels().size(); ++k)
    if (!a.has_label(b.labels()[k].name)) b_open.push_back(k);

  const auto amA = detail::offset_map(a.labels(), a_open);
  const auto amS = detail::offset_map(a.labels(), a_shared);
  const auto bmS = detail::offset_map(b.labels(), b_shared);
  const auto bmC = detail::offset_map(b.labels(), b_open);
  const auto dA = static_cast<Eigen::Index>(amA.size());
  const auto dS = static_cast<Eigen::Index>(amS.size());
  const auto dC = static_cast<Eigen::Index>(bmC.size());
  const auto& x = a.data();
  const auto& y = b.data();

  // R[(i,k),(i',k')] = sum_{s,s'} a[(i,s'),(i',s)] b[(s',k),(s,k')], evaluated
  // as one matrix product over the flattened (s',s) index.
  Matrix a2(dA * dA, dS * dS);
  for (Eigen::Index sp = 0; sp < dS; ++sp)
    for (Eigen::Index s = 0; s < dS; ++s)
      for (Eigen::Index ip = 0; ip < dA; ++ip)
        for (Eigen::Index i = 0; i < dA; ++i)
          a2(i * dA + ip, sp * dS + s) = x(amA[i] + amS[sp], amA[ip] + amS[s]);
  Matrix b2(dS * dS, dC * dC);
  for (Eigen::Index k = 0; k < dC; ++k)
    for (Eigen::Index kp = 0; kp < dC; ++kp)
      for (Eigen::Index sp = 0; sp < dS; ++sp)
        for (Eigen::Index s = 0; s < dS; ++s)
          b2(sp * dS + s, k * dC + kp) = y(bmS[sp] + bmC[k], bmS[s] + bmC[kp]);
  const Matrix r2 = a2 * b2;

  Matrix out(dA * dC, dA * dC);
  for (Eigen::Index kp = 0; kp < dC; ++kp)
    for (Eigen::Index ip = 0; ip < dA; ++ip)
      for (Eigen::Index k = 0; k < dC; ++k)
        for (Eigen::Index i = 0; i < dA; ++i)
          out(i * dC + k, ip * dC + kp) = r2(i * dA + ip, k * dC + kp);

  Labels labels;
  for (auto k : a_open) labels.push_back(a.labels()[k]);
  for (auto k : b_open) labels.push_back(b.labels()[k]);
  return {std::move(labels), std::move(out)};
}

void FactorNetwork::append(const FactorNetwork& other) {
  factors_.insert(factors_.end(), other.factors_.begin(), other.factors_.end());
}

void FactorNetwork::validate() const {
  std::map<std::string, std::pair<int, std::size_t>> seen;
  for (const auto& f : factors_)
    for (const auto& l : f.labels()) {
      auto [it, fresh] = seen.try_emplace(l.name, 0, l.dim);
      if (++it->second.first > 2)
        throw MalformedNetwork("label '" + l.name + "' occurs in more than two factors");
      if (!fresh && it->second.second != l.dim)
        throw DimMismatch("label '" + l.name + "' occurs with dimensions " +
                          std::to_string(it->second.second) + " and " +
                          std::to_string(l.dim));
    }
}

Labels FactorNetwork::open_labels() const {
  std::map<std::string, int> count;
  for (const auto& f : factors_)
    for (const auto& l : f.labels()) ++count[l.name];
  Labels open;
  for (const auto& f : factors_)
    for (const auto& l : f.labels())
      if (count[l.name] == 1) open.push_back(l);
  return open;
}

namespace {

struct NodeShape {
  Labels labels;
  std::vector<std::string> key;  // sorted names

  explicit NodeShape(Labels l) : labels(std::move(l)) {
    for (const auto& x : labels) key.push_back(x.name);
    std::sort(key.begin(), key.end());
  }
};

// Labels of link(a, b) and the names it contracts.
std::pair<Labels, std::vector<std::string>> merged(const Labels& a, const Labels& b) {
  Labels out;
  std::vector<std::string> shared;
  auto in = [](const Labels& ls, const std::string& n) {
    return std::any_of(ls.begin(), ls.end(), [&](const SpaceLabel& l) { return l.name == n; });
  };
  for (const auto& l : a) {
    if (in(b, l.name))
      shared.push_back(l.name);
    else
      out.push_back(l);
  }
  for (const auto& l : b)
    if (!in(a, l.name)) out.push_back(l);
  return {std::move(out), std::move(shared)};
}

std::vector<std::optional<NodeShape>> initial_shapes(const FactorNetwork& network) {
  std::vector<std::optional<NodeShape>> nodes;
  for (const auto& f : network.factors()) nodes.emplace_back(NodeShape(f.labels()));
  return nodes;
}

std::size_t lone_peak(const FactorNetwork& network) {
  return network.empty() ? 1 : network.factors().front().dim();
}

}  // namespace

ContractionPlan plan_contraction(const FactorNetwork& network) {
  network.validate();
  auto nodes = initial_shapes(network);
  ContractionPlan plan;
  plan.peak_dim = network.size() == 1 ? lone_peak(network) : 0;
  for (std::size_t live = nodes.size(); live > 1; --live) {
    using Key = std::tuple<std::size_t, const std::vector<std::string>*,
                           const std::vector<std::string>*, std::size_t, std::size_t>;
    std::optional<Key> best;
    auto less = [](const Key& x, const Key& y) {
      if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) < std::get<0>(y);
      if (*std::get<1>(x) != *std::get<1>(y)) return *std::get<1>(x) < *std::get<1>(y);
      if (*std::get<2>(x) != *std::get<2>(y)) return *std::get<2>(x) < *std::get<2>(y);
      return std::tie(std::get<3>(x), std::get<4>(x)) < std::tie(std::get<3>(y), std::get<4>(y));
    };
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!nodes[i]) continue;
      for (std::size_t j = i + 1; j < nodes.size(); ++j) {
        if (!nodes[j]) continue;
        const auto d = total_dim(merged(nodes[i]->labels, nodes[j]->labels).first);
        const bool i_first = nodes[i]->key <= nodes[j]->key;
        Key k{d, i_first ? &nodes[i]->key : &nodes[j]->key,
              i_first ? &nodes[j]->key : &nodes[i]->key, i, j};
        if (!best || less(k, *best)) best = k;
      }
    }
    const auto i = std::get<3>(*best);
    const auto j = std::get<4>(*best);
    auto [labels, shared] = merged(nodes[i]->labels, nodes[j]->labels);
    const auto d = total_dim(labels);
    plan.steps.push_back({i, j, d, std::move(shared)});
    plan.peak_dim = std::max(plan.peak_dim, d);
    nodes[i].reset();
    nodes[j].reset();
    nodes.emplace_back(NodeShape(std::move(labels)));
  }
  if (network.empty()) plan.peak_dim = 1;
  return plan;
}

ContractionPlan plan_from_order(
    const FactorNetwork& network,
    std::span<const std::pair<std::size_t, std::size_t>> order) {
  network.validate();
  auto nodes = initial_shapes(network);
  ContractionPlan plan;
  plan.peak_dim = network.size() == 1 ? lone_peak(network) : 0;
  auto take = [&](std::size_t id) -> NodeShape {
    if (id >= nodes.size() || !nodes[id])
      throw MalformedNetwork("contraction order refers to unavailable node " +
                             std::to_string(id));
    NodeShape s = std::move(*nodes[id]);
    nodes[id].reset();
    return s;
  };
  for (const auto& [lhs, rhs] : order) {
    if (lhs == rhs) throw MalformedNetwork("contraction order links a node with itself");
    auto a = take(lhs);
    auto b = take(rhs);
    auto [labels, shared] = merged(a.labels, b.labels);
    const auto d = total_dim(labels);
    plan.steps.push_back({lhs, rhs, d, std::move(shared)});
    plan.peak_dim = std::max(plan.peak_dim, d);
    nodes.emplace_back(NodeShape(std::move(labels)));
  }
  // Fold whatever the order left over, in id order.
  for (;;) {
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i]) live.push_back(i);
    if (live.size() < 2) break;
    auto a = take(live[0]);
    auto b = take(live[1]);
    auto [labels, shared] = merged(a.labels, b.labels);
    const auto d = total_dim(labels);
    plan.steps.push_back({live[0], live[1], d, std::move(shared)});
    plan.peak_dim = std::max(plan.peak_dim, d);
    nodes.emplace_back(NodeShape(std::move(labels)));
  }
  if (network.empty()) plan.peak_dim = 1;
  return plan;
}

LabeledOperator contract(const FactorNetwork& network, const ContractionPlan& plan) {
  network.validate();
  if (network.empty()) return LabeledOperator::scalar(1.0);
  std::vector<std::optional<LabeledOperator>> nodes(network.factors().begin(),
                                                    network.factors().end());
  for (const auto& step : plan.steps) {
    if (step.lhs >= nodes.size() || step.rhs >= nodes.size() || !nodes[step.lhs] ||
        !nodes[step.rhs] || step.lhs == step.rhs)
      throw MalformedNetwork("plan does not match the network");
    auto merged_op = link(*nodes[step.lhs], *nodes[step.rhs]);
    nodes[step.lhs].reset();
    nodes[step.rhs].reset();
    nodes.emplace_back(std::move(merged_op));
  }
  std::optional<LabeledOperator> result;
  for (auto& n : nodes) {
    if (!n) continue;
    result = result ? link(*result, *n) : std::move(*n);
  }
  return *result;
}

LabeledOperator contract(const FactorNetwork& network) {
  return contract(network, plan_contraction(network));
}

LabeledOperator contract(const FactorNetwork& network,
                         std::span<const std::pair<std::size_t, std::size_t>> order) {
  return contract(network, plan_from_order(network, order));
}

nlohmann::json ContractionPlan::to_json() const {
  auto js = nlohmann::json::array();
  for (const auto& s : steps)
    js.push_back({{"lhs", s.lhs}, {"rhs", s.rhs}, {"result_dim", s.result_dim},
                  {"shared", s.shared}});
  return {{"steps", std::move(js)}, {"peak_dim", peak_dim}};
}

void enforce_peak_cap(const ContractionPlan& plan, std::size_t max_dim) {
  if (plan.peak_dim <= max_dim) return;
  std::ostringstream msg;
  msg << "contraction peak dimension " << plan.peak_dim << " exceeds cap " << max_dim;
  throw ContractTooLarge(msg.str(), plan.to_json().dump());
}

}  // namespace cts
