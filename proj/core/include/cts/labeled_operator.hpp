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

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cts/errors.hpp"

namespace cts {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// A named finite-dimensional Hilbert space.
struct SpaceLabel {
  std::string name;
  std::size_t dim = 1;

  friend bool operator==(const SpaceLabel&, const SpaceLabel&) = default;
};

using Labels = std::vector<SpaceLabel>;

/// Product of the dimensions of `labels` (1 for an empty list).
std::size_t total_dim(std::span<const SpaceLabel> labels);

/**
 * Dense square operator on the tensor product of an ordered list of labeled
 * spaces.
 *
 * Row and column indices are mixed-radix numbers over the label dimensions
 * with the first label most significant. An empty label list is a scalar
 * (1x1 matrix). Instances are immutable.
 */
class LabeledOperator {
 public:
  /// Scalar zero.
  LabeledOperator();
  LabeledOperator(Labels labels, Matrix data);

  static LabeledOperator scalar(Complex value);
  static LabeledOperator identity(Labels labels);
  /// |v><v| on `labels`.
  static LabeledOperator projector(Labels labels, const Vector& v);

  const Labels& labels() const { return labels_; }
  const Matrix& data() const { return data_; }
  std::size_t dim() const { return static_cast<std::size_t>(data_.rows()); }
  bool is_scalar() const { return labels_.empty(); }

  std::vector<std::string> label_names() const;
  std::optional<std::size_t> position(std::string_view name) const;
  bool has_label(std::string_view name) const { return position(name).has_value(); }
  /// Throws UnknownLabel.
  const SpaceLabel& label(std::string_view name) const;

  Complex trace() const { return data_.trace(); }
  /// Value of a scalar operator; throws ShapeMismatch otherwise.
  Complex value() const;

  LabeledOperator adjoint() const;
  LabeledOperator scaled(Complex factor) const;

  /// Sum and difference align `rhs` to this operator's label order first.
  LabeledOperator operator+(const LabeledOperator& rhs) const;
  LabeledOperator operator-(const LabeledOperator& rhs) const;

 private:
  Labels labels_;
  Matrix data_;
};

LabeledOperator operator*(Complex factor, const LabeledOperator& op);

LabeledOperator tensor_product(const LabeledOperator& a, const LabeledOperator& b);
LabeledOperator partial_trace(const LabeledOperator& a,
                              std::span<const std::string> over);
LabeledOperator partial_transpose(const LabeledOperator& a,
                                  std::span<const std::string> on);
/// Full transpose, equivalent to partial_transpose over every label.
LabeledOperator transpose(const LabeledOperator& a);
LabeledOperator permute_labels(const LabeledOperator& a,
                               std::span<const std::string> order);
/// Renames labels; names absent from `renames` are kept.
LabeledOperator relabel(const LabeledOperator& a,
                        const std::map<std::string, std::string>& renames);
/// Reinterprets the same data over a new label list with equal total
/// dimension (splitting or merging adjacent factors).
LabeledOperator reshape_labels(const LabeledOperator& a, Labels labels);
/// Labels sorted by name; the canonical form used for equality.
LabeledOperator canonicalize(const LabeledOperator& a);

/// _X a = 1_X / d_X (x) Tr_X a, with the original label order kept.
LabeledOperator depolarize_on(const LabeledOperator& a, std::string_view x);
/// _{[1-X]} a = a - _X a.
LabeledOperator residual_on(const LabeledOperator& a, std::string_view x);

/// |Phi+><Phi+| with |Phi+> = d^{-1/2} sum_j |j>|j>.
LabeledOperator max_entangled_state(std::size_t d, const std::string& first,
                                    const std::string& second);
/// |1>><<1| = d |Phi+><Phi+|, the Choi operator of the identity channel.
LabeledOperator unnormalized_me_vector_op(std::size_t d, const std::string& first,
                                          const std::string& second);

/// Largest entrywise deviation after aligning label orders. Throws
/// LabelMismatch when the label sets differ.
double max_abs_diff(const LabeledOperator& a, const LabeledOperator& b);
/// Equality up to label permutation, entrywise within `tol`. Returns false
/// (rather than throwing) when the label sets differ.
bool approx_equal(const LabeledOperator& a, const LabeledOperator& b,
                  double tol = 1e-9);

/// Largest absolute entry.
double max_abs(const LabeledOperator& a);

// JSON: {"labels":[{"name":..,"dim":..}], "data": [[[re,im], ...], ...]}
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LabeledOperator& op);
LabeledOperator operator_from_json(const nlohmann::json& j);

}  // namespace cts
