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
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cts/channels.hpp"
#include "cts/labeled_operator.hpp"

namespace cts {

/// An agent's socket: the spaces it receives from and returns to the process.
/// Either list may be empty (dimension 1).
struct Party {
  std::string name;
  Labels inputs;
  Labels outputs;

  std::size_t in_dim() const { return total_dim(inputs); }
  std::size_t out_dim() const { return total_dim(outputs); }
  std::vector<std::string> input_names() const;
  std::vector<std::string> output_names() const;
};

class PartyLayout {
 public:
  PartyLayout() = default;
  /// Throws LabelCollision on repeated party or space names.
  explicit PartyLayout(std::vector<Party> parties);

  const std::vector<Party>& parties() const { return parties_; }
  std::size_t size() const { return parties_.size(); }
  const Party& operator[](std::size_t k) const { return parties_.at(k); }
  std::optional<std::size_t> index_of(std::string_view party) const;
  Labels all_labels() const;
  std::size_t output_dim_product() const;

 private:
  std::vector<Party> parties_;
};

/// A process matrix W. Construction only checks that W's labels are exactly
/// the layout's spaces; validity is certified separately.
class ProcessMatrix {
 public:
  ProcessMatrix(LabeledOperator op, PartyLayout layout);

  const LabeledOperator& op() const { return op_; }
  const PartyLayout& layout() const { return layout_; }

 private:
  LabeledOperator op_;
  PartyLayout layout_;
};

/// p = Tr[W^T (M_1 (x) ... (x) M_N)], evaluated as the link product of W with
/// one element per party (layout order). Throws LabelMismatch.
double probability(const ProcessMatrix& w, std::span<const ChoiOperator> elements);

/// All outcome tuples for instruments of the given sizes, last index fastest.
std::vector<std::vector<std::size_t>> outcome_tuples(std::span<const std::size_t> sizes);

struct OutcomeTable {
  std::vector<std::vector<std::size_t>> tuples;
  std::vector<double> probabilities;
};

OutcomeTable outcome_distribution(const ProcessMatrix& w,
                                  std::span<const Instrument> instruments);

/// Condition for a non-empty party subset R: the part of W that is traceless
/// on every output in R and fully depolarized on everything outside R.
struct SubsetCondition {
  std::vector<std::string> parties;
  double residual = 0.0;  // max |entry|
  bool ok = true;
};

struct ProcessReport {
  double tol = 0.0;
  bool psd_ok = false;
  std::string psd_method;  // "eigen" or "cholesky"
  std::optional<double> min_eigenvalue;
  double trace = 0.0;
  double expected_trace = 0.0;
  double trace_deviation = 0.0;
  bool trace_ok = false;
  std::vector<SubsetCondition> conditions;
  bool conditions_ok = true;

  bool valid() const { return psd_ok && trace_ok && conditions_ok; }
  /// Normalization holds for every product of channels.
  bool normalized() const { return trace_ok && conditions_ok; }
  std::vector<std::string> failures() const;
  nlohmann::json to_json() const;
};

/// Above this side length the PSD check uses a Cholesky certificate of
/// W + tol*1 instead of a full eigendecomposition.
inline constexpr std::size_t kEigenPsdLimit = 1024;

ProcessReport validate_process(const ProcessMatrix& w, double tol = 1e-9);

/// Applies _{prod_{j in R}[1-O_j] prod_{k not in R} I_k O_k} to W.
LabeledOperator subset_projection(const LabeledOperator& w, const PartyLayout& layout,
                                  std::span<const std::size_t> subset);

struct SamplingReport {
  std::size_t samples = 0;
  double tol = 0.0;
  double max_deviation = 0.0;
  std::size_t worst_sample = 0;
  std::vector<double> deviations;  // |p - 1| per sample
  bool ok = false;

  nlohmann::json to_json() const;
};

/// Normalization under random product channels (no ancillas).
SamplingReport validate_by_sampling(const ProcessMatrix& w, std::size_t n_samples,
                                    std::uint64_t seed, double tol = 1e-9);

/// Normalization with a random joint ancilla state shared by the parties and
/// random channels I_j A_j -> O_j. Parties with ancilla dimension 1 get no
/// ancilla space, so all-ones reproduces validate_by_sampling exactly.
SamplingReport validate_with_ancillas(const ProcessMatrix& w,
                                      std::span<const std::size_t> ancilla_dims,
                                      std::size_t n_samples, std::uint64_t seed,
                                      double tol = 1e-9);

/// One party "A" receiving rho on "A.I"; its output "A.O" (dimension d_out,
/// defaulting to rho's dimension) is discarded.
ProcessMatrix build_state_process(const Matrix& rho, std::optional<std::size_t> d_out = {});

struct CombOptions {
  /// Party B only measures: its output space has dimension 1.
  bool measurement_only = false;
};

/// Two parties in a fixed order: A receives rho on "A.I", its output "A.O"
/// goes through `channel` to "B.I", B's output "B.O" is discarded.
ProcessMatrix build_channel_comb(const ChoiOperator& channel, const Matrix& rho,
                                 CombOptions options = {});

/// Quantum switch: parties A and B act on a target of dimension d in an order
/// controlled by a qubit; party F receives control (x) target on "F.I"
/// (control most significant) and has a one-dimensional output "F.O".
/// The target starts in |0><0| unless given.
ProcessMatrix build_quantum_switch(std::size_t target_dim, const Matrix& control,
                                   std::optional<Matrix> target = {});

}  // namespace cts
