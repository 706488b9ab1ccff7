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

#pragma once

#include <cstddef>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cts/labeled_operator.hpp"

namespace cts {

/**
 * Link product a * b = Tr_S[a^{T_S} b] over the labels S shared by a and b.
 *
 * Result labels are a's unshared labels followed by b's unshared labels, in
 * their original orders. Reduces to the tensor product when nothing is shared
 * and to the scalar Tr[a^T b] when every label is shared.
 */
LabeledOperator link(const LabeledOperator& a, const LabeledOperator& b);

/// Implicit link product of a collection of operators. A label may occur in
/// at most two factors; a shared label is contracted exactly once.
class FactorNetwork {
 public:
  FactorNetwork() = default;
  explicit FactorNetwork(std::vector<LabeledOperator> factors)
      : factors_(std::move(factors)) {}

  void add(LabeledOperator factor) { factors_.push_back(std::move(factor)); }
  void append(const FactorNetwork& other);

  const std::vector<LabeledOperator>& factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }
  bool empty() const { return factors_.empty(); }

  /// Throws MalformedNetwork when a label occurs in three or more factors and
  /// DimMismatch when the two occurrences of a label disagree on dimension.
  void validate() const;

  /// Labels that occur exactly once, i.e. the labels of the network value.
  Labels open_labels() const;

 private:
  std::vector<LabeledOperator> factors_;
};

struct ContractionStep {
  // Node ids: factors are 0..n-1, step k creates node n+k.
  std::size_t lhs = 0;
  std::size_t rhs = 0;
  std::size_t result_dim = 1;
  std::vector<std::string> shared;
};

struct ContractionPlan {
  std::vector<ContractionStep> steps;
  /// Largest matrix side produced by any step (the lone factor's side when
  /// there are no steps).
  std::size_t peak_dim = 1;

  nlohmann::json to_json() const;
};

/// Greedy plan: repeatedly merge the pair whose link result has the smallest
/// matrix side, ties broken by the lexicographic order of sorted label names.
ContractionPlan plan_contraction(const FactorNetwork& network);

/// Evaluates an explicit pair sequence, returning its plan with sizes filled
/// in. Throws MalformedNetwork for ids that are out of range or consumed.
ContractionPlan plan_from_order(const FactorNetwork& network,
                                std::span<const std::pair<std::size_t, std::size_t>> order);

/// Contracts with the greedy plan.
LabeledOperator contract(const FactorNetwork& network);
LabeledOperator contract(const FactorNetwork& network, const ContractionPlan& plan);
LabeledOperator contract(const FactorNetwork& network,
                         std::span<const std::pair<std::size_t, std::size_t>> order);

/// Throws ContractTooLarge when the plan's peak exceeds `max_dim`.
void enforce_peak_cap(const ContractionPlan& plan, std::size_t max_dim);

}  // namespace cts
