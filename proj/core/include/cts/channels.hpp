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

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cts/labeled_operator.hpp"

namespace cts {

/**
 * Choi operator M = sum_ij |i><j| (x) M(|i><j|) of a linear map, carried as a
 * labeled operator whose labels split into inputs followed by outputs.
 * Either side may be empty (state preparations, POVM elements).
 */
class ChoiOperator {
 public:
  ChoiOperator() = default;
  /// `op` may list its labels in any order; in/out partition is by name.
  ChoiOperator(LabeledOperator op, std::vector<std::string> in_labels,
               std::vector<std::string> out_labels);

  const LabeledOperator& op() const { return op_; }
  const std::vector<std::string>& in_labels() const { return in_; }
  const std::vector<std::string>& out_labels() const { return out_; }
  Labels in_spaces() const;
  Labels out_spaces() const;
  std::size_t in_dim() const;
  std::size_t out_dim() const;

  ChoiOperator relabeled(const std::map<std::string, std::string>& renames) const;
  ChoiOperator scaled(double factor) const;
  /// Same data over new input and output label lists (splits or merges).
  ChoiOperator reshaped(Labels in, Labels out) const;

 private:
  LabeledOperator op_;
  std::vector<std::string> in_;
  std::vector<std::string> out_;
};

ChoiOperator operator+(const ChoiOperator& a, const ChoiOperator& b);

/// Finite outcome-indexed family of Choi operators on common spaces.
class Instrument {
 public:
  Instrument() = default;
  explicit Instrument(std::vector<ChoiOperator> outcomes);

  const std::vector<ChoiOperator>& outcomes() const { return outcomes_; }
  std::size_t size() const { return outcomes_.size(); }
  const ChoiOperator& operator[](std::size_t k) const { return outcomes_.at(k); }
  /// Element-wise sum: the channel obtained by ignoring the outcome.
  ChoiOperator sum() const;
  Instrument relabeled(const std::map<std::string, std::string>& renames) const;

 private:
  std::vector<ChoiOperator> outcomes_;
};

/// Kraus matrices map the joint input space (dim prod in) to the joint output
/// space (dim prod out).
ChoiOperator choi_from_kraus(std::span<const Matrix> kraus, Labels in, Labels out);
ChoiOperator choi_from_kraus(std::span<const Matrix> kraus, const SpaceLabel& in,
                             const SpaceLabel& out);
/// Choi operator of rho -> Tr[E rho], i.e. E^T on the input with no outputs.
ChoiOperator povm_element(const Matrix& effect, Labels in);

struct CptpReport {
  bool cp = false;
  bool trace_preserving = false;
  double min_eigenvalue = 0.0;
  double hermiticity_deviation = 0.0;
  double trace_deviation = 0.0;  // max |Tr_out(op) - 1_in|

  bool cptp() const { return cp && trace_preserving; }
};

CptpReport is_cptp(const ChoiOperator& c, double tol = 1e-9);

struct InstrumentReport {
  bool elements_cp = true;
  bool elements_trace_non_increasing = true;
  CptpReport sum;
  bool valid() const { return elements_cp && elements_trace_non_increasing && sum.cptp(); }
};

InstrumentReport check_instrument(const Instrument& instrument, double tol = 1e-9);

/// Smallest eigenvalue of the Hermitian part (op + op^dagger) / 2.
double min_hermitian_eigenvalue(const Matrix& m);

/// State labels must equal c's input labels; result lives on c's outputs.
LabeledOperator apply_channel(const ChoiOperator& c, const LabeledOperator& state);

// Seeded generators. Identical arguments give bit-identical results.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index = 0);
Matrix random_unitary(std::size_t d, std::uint64_t seed);
Vector random_pure_state(std::size_t d, std::uint64_t seed);
LabeledOperator random_state(std::size_t d, std::uint64_t seed,
                             const std::string& label = "A");
/// Stinespring construction with environment dimension d_in * d_out.
ChoiOperator random_cptp(std::size_t d_in, std::size_t d_out, std::uint64_t seed,
                         const std::string& in_label = "in",
                         const std::string& out_label = "out");
/// The environment basis is split into `n_outcomes` contiguous groups.
Instrument random_instrument(std::size_t d_in, std::size_t d_out, std::size_t n_outcomes,
                             std::uint64_t seed, const std::string& in_label = "in",
                             const std::string& out_label = "out");

}  // namespace cts
