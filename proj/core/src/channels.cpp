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

#include "cts/channels.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <random>

#include "cts/link.hpp"

namespace cts {

namespace {

Labels spaces_named(const LabeledOperator& op, const std::vector<std::string>& names) {
  Labels out;
  for (const auto& n : names) out.push_back(op.label(n));
  return out;
}

std::vector<std::string> names_of(const Labels& labels) {
  std::vector<std::string> n;
  for (const auto& l : labels) n.push_back(l.name);
  return n;
}

}  // namespace

ChoiOperator::ChoiOperator(LabeledOperator op, std::vector<std::string> in_labels,
                           std::vector<std::string> out_labels)
    : in_(std::move(in_labels)), out_(std::move(out_labels)) {
  std::vector<std::string> order = in_;
  order.insert(order.end(), out_.begin(), out_.end());
  if (order.size() != op.labels().size())
    throw LabelMismatch("input and output labels must partition the operator labels");
  try {
    op_ = permute_labels(op, order);
  } catch (const NotAPermutation& e) {
    throw LabelMismatch(std::string("input/output partition: ") + e.what());
  }
}

Labels ChoiOperator::in_spaces() const { return spaces_named(op_, in_); }
Labels ChoiOperator::out_spaces() const { return spaces_named(op_, out_); }
std::size_t ChoiOperator::in_dim() const { return total_dim(in_spaces()); }
std::size_t ChoiOperator::out_dim() const { return total_dim(out_spaces()); }

ChoiOperator ChoiOperator::relabeled(const std::map<std::string, std::string>& renames) const {
  auto rename = [&](std::vector<std::string> names) {
    for (auto& n : names)
      if (auto it = renames.find(n); it != renames.end()) n = it->second;
    return names;
  };
  return {relabel(op_, renames), rename(in_), rename(out_)};
}

ChoiOperator ChoiOperator::scaled(double factor) const {
  return {op_.scaled(factor), in_, out_};
}

ChoiOperator ChoiOperator::reshaped(Labels in, Labels out) const {
  if (total_dim(in) != in_dim() || total_dim(out) != out_dim())
    throw DimMismatch("reshaped Choi operator must keep input and output dimensions");
  auto in_names = names_of(in);
  auto out_names = names_of(out);
  Labels all = std::move(in);
  all.insert(all.end(), out.begin(), out.end());
  return {reshape_labels(op_, std::move(all)), std::move(in_names), std::move(out_names)};
}

ChoiOperator operator+(const ChoiOperator& a, const ChoiOperator& b) {
  return {a.op() + b.op(), a.in_labels(), a.out_labels()};
}

Instrument::Instrument(std::vector<ChoiOperator> outcomes) : outcomes_(std::move(outcomes)) {
  if (outcomes_.empty()) throw InvalidInput("instrument needs at least one outcome");
  const auto in = outcomes_.front().in_spaces();
  const auto out = outcomes_.front().out_spaces();
  for (const auto& o : outcomes_)
    if (o.in_spaces() != in || o.out_spaces() != out)
      throw LabelMismatch("instrument outcomes must share input and output spaces");
}

ChoiOperator Instrument::sum() const {
  ChoiOperator total = outcomes_.front();
  for (std::size_t k = 1; k < outcomes_.size(); ++k) total = total + outcomes_[k];
  return total;
}

Instrument Instrument::relabeled(const std::map<std::string, std::string>& renames) const {
  std::vector<ChoiOperator> out;
  for (const auto& o : outcomes_) out.push_back(o.relabeled(renames));
  return Instrument(std::move(out));
}

ChoiOperator choi_from_kraus(std::span<const Matrix> kraus, Labels in, Labels out) {
  const auto d_in = static_cast<Eigen::Index>(total_dim(in));
  const auto d_out = static_cast<Eigen::Index>(total_dim(out));
  Matrix choi = Matrix::Zero(d_in * d_out, d_in * d_out);
  Vector v(d_in * d_out);
  for (const auto& k : kraus) {
    if (k.rows() != d_out || k.cols() != d_in)
      throw ShapeMismatch("Kraus operator is " + std::to_string(k.rows()) + "x" +
                          std::to_string(k.cols()) + ", expected " +
                          std::to_string(d_out) + "x" + std::to_string(d_in));
    // |K>> = sum_i |i> (x) K|i>
    for (Eigen::Index i = 0; i < d_in; ++i)
      for (Eigen::Index a = 0; a < d_out; ++a) v(i * d_out + a) = k(a, i);
    choi.noalias() += v * v.adjoint();
  }
  auto in_names = names_of(in);
  auto out_names = names_of(out);
  Labels all = std::move(in);
  all.insert(all.end(), out.begin(), out.end());
  return {LabeledOperator(std::move(all), std::move(choi)), std::move(in_names),
          std::move(out_names)};
}

ChoiOperator choi_from_kraus(std::span<const Matrix> kraus, const SpaceLabel& in,
                             const SpaceLabel& out) {
  return choi_from_kraus(kraus, Labels{in}, Labels{out});
}

ChoiOperator povm_element(const Matrix& effect, Labels in) {
  auto names = names_of(in);
  return {LabeledOperator(std::move(in), effect.transpose()), std::move(names), {}};
}

double min_hermitian_eigenvalue(const Matrix& m) {
  const Matrix h = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

CptpReport is_cptp(const ChoiOperator& c, double tol) {
  CptpReport r;
  const auto& m = c.op().data();
  r.hermiticity_deviation = (m - m.adjoint()).cwiseAbs().maxCoeff();
  r.min_eigenvalue = min_hermitian_eigenvalue(m);
  r.cp = r.min_eigenvalue >= -tol && r.hermiticity_deviation <= tol;
  const auto reduced = partial_trace(c.op(), c.out_labels());
  r.trace_deviation = max_abs_diff(reduced, LabeledOperator::identity(c.in_spaces()));
  r.trace_preserving = r.trace_deviation <= tol;
  return r;
}

InstrumentReport check_instrument(const Instrument& instrument, double tol) {
  InstrumentReport r;
  for (const auto& e : instrument.outcomes()) {
    if (min_hermitian_eigenvalue(e.op().data()) < -tol) r.elements_cp = false;
    const auto reduced = partial_trace(e.op(), e.out_labels());
    const auto ident = LabeledOperator::identity(e.in_spaces());
    const auto gap = ident - reduced;
    if (min_hermitian_eigenvalue(gap.data()) < -tol) r.elements_trace_non_increasing = false;
  }
  r.sum = is_cptp(instrument.sum(), tol);
  return r;
}

LabeledOperator apply_channel(const ChoiOperator& c, const LabeledOperator& state) {
  const auto in = c.in_spaces();
  bool match = state.labels().size() == in.size();
  for (const auto& l : in) match = match && state.has_label(l.name) && state.label(l.name) == l;
  if (!match) throw LabelMismatch("state labels do not match the channel inputs");
  return permute_labels(link(state, c.op()), c.out_labels());
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  // splitmix64 finalizer over a combination of the three words
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ stream) ^ (index * 0x2545f4914f6cdd1dULL));
}

namespace {

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = Complex(re, im) / std::sqrt(2.0);
    }
  return g;
}

void require_positive(std::size_t d, const char* what) {
  if (d < 1) throw BadDimension(std::string(what) + " needs dimension >= 1");
}

}  // namespace

Matrix random_unitary(std::size_t d, std::uint64_t seed) {
  require_positive(d, "random_unitary");
  std::mt19937_64 rng(seed);
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(n, n, rng));
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  // Fix the column phases so the distribution is Haar.
  for (Eigen::Index k = 0; k < n; ++k) {
    const double mag = std::abs(r(k, k));
    q.col(k) *= mag > 0.0 ? r(k, k) / mag : Complex(1.0);
  }
  return q;
}

Vector random_pure_state(std::size_t d, std::uint64_t seed) {
  require_positive(d, "random_pure_state");
  std::mt19937_64 rng(seed);
  Vector v = gaussian_matrix(static_cast<Eigen::Index>(d), 1, rng).col(0);
  return v / v.norm();
}

LabeledOperator random_state(std::size_t d, std::uint64_t seed, const std::string& label) {
  require_positive(d, "random_state");
  std::mt19937_64 rng(seed);
  const auto n = static_cast<Eigen::Index>(d);
  const Matrix g = gaussian_matrix(n, n, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return {{{label, d}}, std::move(rho)};
}

namespace {

// Kraus operators of a random Stinespring isometry, one per environment state.
std::vector<Matrix> stinespring_kraus(std::size_t d_in, std::size_t d_out,
                                      std::uint64_t seed) {
  require_positive(d_in, "random channel input");
  require_positive(d_out, "random channel output");
  const auto n_in = static_cast<Eigen::Index>(d_in);
  const auto n_out = static_cast<Eigen::Index>(d_out);
  const auto n_env = n_in * n_out;
  const Matrix v = random_unitary(d_out * d_in * d_out, seed).leftCols(n_in);
  std::vector<Matrix> kraus;
  for (Eigen::Index e = 0; e < n_env; ++e) {
    Matrix k(n_out, n_in);
    for (Eigen::Index o = 0; o < n_out; ++o) k.row(o) = v.row(o * n_env + e);
    kraus.push_back(std::move(k));
  }
  return kraus;
}

}  // namespace

ChoiOperator random_cptp(std::size_t d_in, std::size_t d_out, std::uint64_t seed,
                         const std::string& in_label, const std::string& out_label) {
  const auto kraus = stinespring_kraus(d_in, d_out, seed);
  return choi_from_kraus(kraus, SpaceLabel{in_label, d_in}, SpaceLabel{out_label, d_out});
}

Instrument random_instrument(std::size_t d_in, std::size_t d_out, std::size_t n_outcomes,
                             std::uint64_t seed, const std::string& in_label,
                             const std::string& out_label) {
  const auto kraus = stinespring_kraus(d_in, d_out, seed);
  const std::size_t n_env = kraus.size();
  if (n_outcomes < 1 || n_outcomes > n_env)
    throw BadDimension("random_instrument supports 1.." + std::to_string(n_env) +
                       " outcomes, got " + std::to_string(n_outcomes));
  std::vector<ChoiOperator> elements;
  for (std::size_t g = 0; g < n_outcomes; ++g) {
    const auto lo = g * n_env / n_outcomes;
    const auto hi = (g + 1) * n_env / n_outcomes;
    std::span<const Matrix> group(kraus.data() + lo, hi - lo);
    elements.push_back(
        choi_from_kraus(group, SpaceLabel{in_label, d_in}, SpaceLabel{out_label, d_out}));
  }
  return Instrument(std::move(elements));
}

}  // namespace cts
