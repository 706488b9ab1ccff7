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

#include "cts/labeled_operator.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "index_maps.hpp"

namespace cts {

std::size_t total_dim(std::span<const SpaceLabel> labels) {
  std::size_t d = 1;
  for (const auto& l : labels) d *= l.dim;
  return d;
}

namespace {

void check_labels(const Labels& labels) {
  std::set<std::string_view> seen;
  for (const auto& l : labels) {
    if (l.name.empty()) throw InvalidInput("space label with empty name");
    if (l.dim < 1) throw BadDimension("space '" + l.name + "' has dimension 0");
    if (!seen.insert(l.name).second)
      throw LabelCollision("label '" + l.name + "' appears twice");
  }
}

std::vector<std::size_t> positions_of(const LabeledOperator& a,
                                      std::span<const std::string> names) {
  std::vector<std::size_t> pos;
  pos.reserve(names.size());
  for (const auto& n : names) {
    auto p = a.position(n);
    if (!p) throw UnknownLabel("operator has no label '" + n + "'");
    if (std::find(pos.begin(), pos.end(), *p) != pos.end())
      throw LabelCollision("label '" + n + "' listed twice");
    pos.push_back(*p);
  }
  return pos;
}

std::vector<std::size_t> complement(std::size_t n,
                                    const std::vector<std::size_t>& pos) {
  std::vector<std::size_t> rest;
  for (std::size_t k = 0; k < n; ++k)
    if (std::find(pos.begin(), pos.end(), k) == pos.end()) rest.push_back(k);
  return rest;
}

bool same_label_set(const Labels& a, const Labels& b) {
  if (a.size() != b.size()) return false;
  for (const auto& l : a)
    if (std::find(b.begin(), b.end(), l) == b.end()) return false;
  return true;
}

Complex entry_from_json(const nlohmann::json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return {e[0].get<double>(), e[1].get<double>()};
  throw ParseError("matrix entry must be a number or a [re, im] pair");
}

}  // namespace

LabeledOperator::LabeledOperator() : data_(Matrix::Zero(1, 1)) {}

LabeledOperator::LabeledOperator(Labels labels, Matrix data)
    : labels_(std::move(labels)), data_(std::move(data)) {
  check_labels(labels_);
  const auto d = static_cast<Eigen::Index>(total_dim(labels_));
  if (data_.rows() != d || data_.cols() != d)
    throw ShapeMismatch("operator data is " + std::to_string(data_.rows()) + "x" +
                        std::to_string(data_.cols()) + " but labels span " +
                        std::to_string(d));
}

LabeledOperator LabeledOperator::scalar(Complex value) {
  Matrix m(1, 1);
  m(0, 0) = value;
  return {{}, std::move(m)};
}

LabeledOperator LabeledOperator::identity(Labels labels) {
  const auto d = static_cast<Eigen::Index>(total_dim(labels));
  return {std::move(labels), Matrix::Identity(d, d)};
}

LabeledOperator LabeledOperator::projector(Labels labels, const Vector& v) {
  return {std::move(labels), v * v.adjoint()};
}

std::vector<std::string> LabeledOperator::label_names() const {
  std::vector<std::string> names;
  names.reserve(labels_.size());
  for (const auto& l : labels_) names.push_back(l.name);
  return names;
}

std::optional<std::size_t> LabeledOperator::position(std::string_view name) const {
  for (std::size_t k = 0; k < labels_.size(); ++k)
    if (labels_[k].name == name) return k;
  return std::nullopt;
}

const SpaceLabel& LabeledOperator::label(std::string_view name) const {
  auto p = position(name);
  if (!p) throw UnknownLabel("operator has no label '" + std::string(name) + "'");
  return labels_[*p];
}

Complex LabeledOperator::value() const {
  if (dim() != 1) throw ShapeMismatch("operator is not a scalar");
  return data_(0, 0);
}

LabeledOperator LabeledOperator::adjoint() const {
  return {labels_, data_.adjoint()};
}

LabeledOperator LabeledOperator::scaled(Complex factor) const {
  return {labels_, data_ * factor};
}

LabeledOperator LabeledOperator::operator+(const LabeledOperator& rhs) const {
  if (!same_label_set(labels_, rhs.labels_))
    throw LabelMismatch("cannot add operators on different spaces");
  if (rhs.labels_ == labels_) return {labels_, data_ + rhs.data_};
  auto aligned = permute_labels(rhs, label_names());
  return {labels_, data_ + aligned.data()};
}

LabeledOperator LabeledOperator::operator-(const LabeledOperator& rhs) const {
  if (!same_label_set(labels_, rhs.labels_))
    throw LabelMismatch("cannot subtract operators on different spaces");
  if (rhs.labels_ == labels_) return {labels_, data_ - rhs.data_};
  auto aligned = permute_labels(rhs, label_names());
  return {labels_, data_ - aligned.data()};
}

LabeledOperator operator*(Complex factor, const LabeledOperator& op) {
  return op.scaled(factor);
}

LabeledOperator tensor_product(const LabeledOperator& a, const LabeledOperator& b) {
  Labels labels = a.labels();
  for (const auto& l : b.labels()) {
    if (a.has_label(l.name))
      throw LabelCollision("label '" + l.name + "' appears in both factors");
    labels.push_back(l);
  }
  const auto& x = a.data();
  const auto& y = b.data();
  const auto n = y.rows();
  Matrix out(x.rows() * n, x.cols() * n);
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      out.block(i * n, j * n, n, n) = x(i, j) * y;
  return {std::move(labels), std::move(out)};
}

LabeledOperator partial_trace(const LabeledOperator& a,
                              std::span<const std::string> over) {
  const auto traced = positions_of(a, over);
  const auto kept = complement(a.labels().size(), traced);
  const auto kmap = detail::offset_map(a.labels(), kept);
  const auto tmap = detail::offset_map(a.labels(), traced);
  const auto n = static_cast<Eigen::Index>(kmap.size());
  const auto& in = a.data();
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) {
      Complex acc = 0.0;
      for (auto t : tmap) acc += in(kmap[r] + t, kmap[c] + t);
      out(r, c) = acc;
    }
  Labels labels;
  for (auto k : kept) labels.push_back(a.labels()[k]);
  return {std::move(labels), std::move(out)};
}

LabeledOperator partial_transpose(const LabeledOperator& a,
                                  std::span<const std::string> on) {
  const auto tpos = positions_of(a, on);
  if (tpos.empty()) return a;
  const auto kpos = complement(a.labels().size(), tpos);
  const auto kmap = detail::offset_map(a.labels(), kpos);
  const auto tmap = detail::offset_map(a.labels(), tpos);
  const auto& in = a.data();
  Matrix out(in.rows(), in.cols());
  for (auto kc : kmap)
    for (auto td : tmap)
      for (auto ka : kmap)
        for (auto tb : tmap) out(ka + tb, kc + td) = in(ka + td, kc + tb);
  return {a.labels(), std::move(out)};
}

LabeledOperator transpose(const LabeledOperator& a) {
  return {a.labels(), a.data().transpose()};
}

LabeledOperator permute_labels(const LabeledOperator& a,
                               std::span<const std::string> order) {
  if (order.size() != a.labels().size())
    throw NotAPermutation("permutation has " + std::to_string(order.size()) +
                          " entries for " + std::to_string(a.labels().size()) +
                          " labels");
  std::vector<std::size_t> pos;
  try {
    pos = positions_of(a, order);
  } catch (const Error& e) {
    throw NotAPermutation(e.what());
  }
  bool trivial = true;
  for (std::size_t k = 0; k < pos.size(); ++k) trivial = trivial && pos[k] == k;
  if (trivial) return a;
  const auto map = detail::offset_map(a.labels(), pos);
  const auto n = static_cast<Eigen::Index>(map.size());
  const auto& in = a.data();
  Matrix out(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) out(r, c) = in(map[r], map[c]);
  Labels labels;
  for (auto p : pos) labels.push_back(a.labels()[p]);
  return {std::move(labels), std::move(out)};
}

LabeledOperator relabel(const LabeledOperator& a,
                        const std::map<std::string, std::string>& renames) {
  Labels labels = a.labels();
  for (auto& l : labels) {
    auto it = renames.find(l.name);
    if (it != renames.end()) l.name = it->second;
  }
  return {std::move(labels), a.data()};
}

LabeledOperator reshape_labels(const LabeledOperator& a, Labels labels) {
  if (total_dim(labels) != a.dim())
    throw DimMismatch("reshape to total dimension " +
                      std::to_string(total_dim(labels)) + " from " +
                      std::to_string(a.dim()));
  return {std::move(labels), a.data()};
}

LabeledOperator canonicalize(const LabeledOperator& a) {
  auto names = a.label_names();
  std::sort(names.begin(), names.end());
  return permute_labels(a, names);
}

LabeledOperator depolarize_on(const LabeledOperator& a, std::string_view x) {
  const SpaceLabel space = a.label(x);
  const std::string name(x);
  auto reduced = partial_trace(a, std::span<const std::string>(&name, 1));
  auto mixed = LabeledOperator::identity({space}).scaled(1.0 / double(space.dim));
  return permute_labels(tensor_product(mixed, reduced), a.label_names());
}

LabeledOperator residual_on(const LabeledOperator& a, std::string_view x) {
  auto dep = depolarize_on(a, x);
  return {a.labels(), a.data() - dep.data()};
}

LabeledOperator unnormalized_me_vector_op(std::size_t d, const std::string& first,
                                          const std::string& second) {
  if (d < 1) throw BadDimension("maximally entangled state needs d >= 1");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(d * d));
  for (std::size_t j = 0; j < d; ++j) v(static_cast<Eigen::Index>(j * d + j)) = 1.0;
  return LabeledOperator::projector({{first, d}, {second, d}}, v);
}

LabeledOperator max_entangled_state(std::size_t d, const std::string& first,
                                    const std::string& second) {
  return unnormalized_me_vector_op(d, first, second).scaled(1.0 / double(d));
}

double max_abs(const LabeledOperator& a) {
  if (a.data().size() == 0) return 0.0;
  return std::sqrt(a.data().cwiseAbs2().maxCoeff());
}

double max_abs_diff(const LabeledOperator& a, const LabeledOperator& b) {
  if (!same_label_set(a.labels(), b.labels()))
    throw LabelMismatch("operators live on different spaces");
  auto aligned = permute_labels(b, a.label_names());
  return std::sqrt((a.data() - aligned.data()).cwiseAbs2().maxCoeff());
}

bool approx_equal(const LabeledOperator& a, const LabeledOperator& b, double tol) {
  if (!same_label_set(a.labels(), b.labels())) return false;
  return max_abs_diff(canonicalize(a), canonicalize(b)) <= tol;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) throw ParseError("matrix rows must be non-empty arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ParseError("matrix rows have unequal lengths");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = entry_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

nlohmann::json to_json(const LabeledOperator& op) {
  auto labels = nlohmann::json::array();
  for (const auto& l : op.labels()) labels.push_back({{"name", l.name}, {"dim", l.dim}});
  return {{"labels", std::move(labels)}, {"data", matrix_to_json(op.data())}};
}

LabeledOperator operator_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("labels") || !j.contains("data"))
    throw ParseError("labeled operator needs 'labels' and 'data'");
  Labels labels;
  for (const auto& l : j.at("labels")) {
    if (!l.contains("name") || !l.contains("dim") || !l["dim"].is_number_integer() ||
        l["dim"].get<long long>() < 1)
      throw ParseError("label entries need a 'name' and a positive integer 'dim'");
    labels.push_back({l["name"].get<std::string>(), l["dim"].get<std::size_t>()});
  }
  return {std::move(labels), matrix_from_json(j.at("data"))};
}

}  // namespace cts
