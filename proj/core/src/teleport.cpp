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

#include "cts/teleport.hpp"

#include <cmath>
#include <numbers>

#include "cts/link.hpp"

namespace cts {

namespace {

void check_index(std::size_t d, std::size_t n, std::size_t m) {
  if (d < 1) throw BadDimension("Bell basis needs d >= 1");
  if (n >= d || m >= d)
    throw IndexOutOfRange("Bell index (" + std::to_string(n) + "," + std::to_string(m) +
                          ") out of range for d=" + std::to_string(d));
}

Complex root_of_unity(std::size_t power, std::size_t d) {
  return std::polar(1.0, 2.0 * std::numbers::pi * double(power % d) / double(d));
}

}  // namespace

Vector bell_state(std::size_t d, std::size_t n, std::size_t m) {
  check_index(d, n, m);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(d * d));
  const double norm = 1.0 / std::sqrt(double(d));
  for (std::size_t j = 0; j < d; ++j)
    v(static_cast<Eigen::Index>(j * d + (j + m) % d)) = norm * root_of_unity(j * n, d);
  return v;
}

Matrix correction_unitary(std::size_t d, std::size_t n, std::size_t m) {
  check_index(d, n, m);
  const auto dd = static_cast<Eigen::Index>(d);
  Matrix u = Matrix::Zero(dd, dd);
  for (std::size_t k = 0; k < d; ++k)
    u(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>((k + m) % d)) =
        root_of_unity(k * n, d);
  return u;
}

Matrix correction_unitary(std::size_t d, std::size_t flat) {
  if (d < 1 || flat >= d * d) throw IndexOutOfRange("flat Bell index out of range");
  const auto idx = BellIndex::from_flat(flat, d);
  return correction_unitary(d, idx.n, idx.m);
}

ChoiOperator bsm_element(std::size_t d, std::size_t flat, const std::string& a,
                         const std::string& b, const std::string& message) {
  if (d < 1 || flat >= d * d) throw IndexOutOfRange("flat Bell index out of range");
  const auto idx = BellIndex::from_flat(flat, d);
  const auto dd = static_cast<Eigen::Index>(d * d);
  Matrix k = Matrix::Zero(dd, dd);
  k.row(static_cast<Eigen::Index>(flat)) = bell_state(d, idx.n, idx.m).adjoint();
  const Matrix kraus[] = {k};
  return choi_from_kraus(kraus, Labels{{a, d}, {b, d}}, Labels{{message, d * d}});
}

Instrument bsm_instrument(std::size_t d, const std::string& a, const std::string& b,
                          const std::string& message) {
  if (d < 1) throw BadDimension("Bell measurement needs d >= 1");
  std::vector<ChoiOperator> elements;
  for (std::size_t f = 0; f < d * d; ++f) elements.push_back(bsm_element(d, f, a, b, message));
  return Instrument(std::move(elements));
}

ChoiOperator bsm_postselect0(std::size_t d, const std::string& a, const std::string& b) {
  const Vector phi = bell_state(d, 0, 0);
  return povm_element(phi * phi.adjoint(), Labels{{a, d}, {b, d}});
}

namespace {

Matrix cu_kraus(std::size_t d, std::size_t flat) {
  const auto dd = static_cast<Eigen::Index>(d);
  Matrix k = Matrix::Zero(dd, dd * dd * dd);
  k.middleCols(static_cast<Eigen::Index>(flat) * dd, dd) = correction_unitary(d, flat);
  return k;
}

Labels cu_inputs(std::size_t d, const std::string& message, const std::string& probe) {
  return {{message, d * d}, {probe, d}};
}

}  // namespace

ChoiOperator cu_element(std::size_t d, std::size_t flat, const std::string& message,
                        const std::string& probe, const std::string& out) {
  if (d < 1 || flat >= d * d) throw IndexOutOfRange("flat Bell index out of range");
  const Matrix kraus[] = {cu_kraus(d, flat)};
  return choi_from_kraus(kraus, cu_inputs(d, message, probe), Labels{{out, d}});
}

ChoiOperator cu_instrument(std::size_t d, const std::string& message, const std::string& probe,
                           const std::string& out) {
  if (d < 1) throw BadDimension("correction needs d >= 1");
  std::vector<Matrix> kraus;
  for (std::size_t f = 0; f < d * d; ++f) kraus.push_back(cu_kraus(d, f));
  return choi_from_kraus(kraus, cu_inputs(d, message, probe), Labels{{out, d}});
}

nlohmann::json TeleportReport::to_json() const {
  auto rows = nlohmann::json::array();
  for (const auto& o : outcomes)
    rows.push_back({{"n", o.index.n},
                    {"m", o.index.m},
                    {"flat", o.flat},
                    {"probability", o.probability},
                    {"fidelity", o.fidelity},
                    {"uncorrected_fidelity", o.uncorrected_fidelity}});
  return {{"dim", dim},
          {"outcomes", std::move(rows)},
          {"max_probability_error", max_probability_error},
          {"min_fidelity", min_fidelity}};
}

TeleportReport teleport_state_demo(std::size_t d, const Vector& psi) {
  if (d < 1) throw BadDimension("teleportation needs d >= 1");
  if (psi.size() != static_cast<Eigen::Index>(d) || std::abs(psi.norm() - 1.0) > 1e-9)
    throw BadState("state to teleport must be a unit vector of dimension " + std::to_string(d));

  const auto input = LabeledOperator::projector({{"A", d}}, psi);
  const auto pair = max_entangled_state(d, "A'", "B");
  const auto correction = cu_instrument(d, "M", "B", "B'");
  const auto discard_message = LabeledOperator::identity({{"M", d * d}});
  auto fidelity = [&](const LabeledOperator& rho, double p) {
    return (psi.adjoint() * rho.data() * psi)(0, 0).real() / p;
  };

  TeleportReport r;
  r.dim = d;
  r.min_fidelity = 1.0;
  for (std::size_t f = 0; f < d * d; ++f) {
    const auto bsm = bsm_element(d, f, "A", "A'", "M");
    const auto corrected = contract(FactorNetwork({input, pair, bsm.op(), correction.op()}));
    const auto raw = contract(FactorNetwork({input, pair, bsm.op(), discard_message}));
    TeleportOutcome o;
    o.index = BellIndex::from_flat(f, d);
    o.flat = f;
    o.probability = corrected.trace().real();
    o.fidelity = fidelity(corrected, o.probability);
    o.uncorrected_fidelity = fidelity(raw, raw.trace().real());
    r.max_probability_error =
        std::max(r.max_probability_error, std::abs(o.probability - 1.0 / double(d * d)));
    r.min_fidelity = std::min(r.min_fidelity, o.fidelity);
    r.outcomes.push_back(o);
  }
  return r;
}

}  // namespace cts
