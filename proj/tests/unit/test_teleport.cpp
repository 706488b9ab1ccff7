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
#include <numbers>

#include "corpus.hpp"
#include "cts/link.hpp"
#include "cts/teleport.hpp"
#include "oracles.hpp"

using namespace cts;

namespace {

double max_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

Matrix gram(std::size_t d) {
  Matrix basis(d * d, d * d);
  for (std::size_t f = 0; f < d * d; ++f) {
    const auto i = BellIndex::from_flat(f, d);
    basis.col(f) = bell_state(d, i.n, i.m);
  }
  return basis.adjoint() * basis;
}

Matrix message_projector(std::size_t d, std::size_t flat) {
  Matrix m = Matrix::Zero(d * d, d * d);
  m(flat, flat) = 1.0;
  return m;
}

}  // namespace

TEST_CASE("Bell states", "[teleport]") {
  Vector expected = Vector::Zero(4);
  expected(0) = expected(3) = 1.0 / std::sqrt(2.0);
  CHECK((bell_state(2, 0, 0) - expected).cwiseAbs().maxCoeff() < 1e-15);
  for (std::size_t d : {2, 3}) CHECK(max_diff(gram(d), Matrix::Identity(d * d, d * d)) < 1e-12);
  CHECK_THROWS_AS(bell_state(2, 2, 0), IndexOutOfRange);
  CHECK_THROWS_AS(bell_state(2, 0, 2), IndexOutOfRange);
}

TEST_CASE("Bell states follow the entrywise formula", "[teleport]") {
  for (std::size_t d : {2, 3, 4})
    for (std::size_t n = 0; n < d; ++n)
      for (std::size_t m = 0; m < d; ++m) {
        const Vector v = bell_state(d, n, m);
        for (std::size_t j = 0; j < d; ++j)
          for (std::size_t k = 0; k < d; ++k) {
            const Complex expected =
                k == (j + m) % d
                    ? std::polar(1.0, 2.0 * std::numbers::pi * double(j * n) / double(d)) /
                          std::sqrt(double(d))
                    : Complex(0.0);
            CHECK(std::abs(v(j * d + k) - expected) < 1e-14);
          }
      }
}

TEST_CASE("Bell basis is complete", "[teleport][property]") {
  for (std::size_t d : {2, 3, 4, 5}) {
    Matrix sum = Matrix::Zero(d * d, d * d);
    for (std::size_t n = 0; n < d; ++n)
      for (std::size_t m = 0; m < d; ++m) {
        const Vector v = bell_state(d, n, m);
        sum += v * v.adjoint();
      }
    CHECK(max_diff(sum, Matrix::Identity(d * d, d * d)) < 1e-12);
  }
}

TEST_CASE("flat index is a bijection", "[teleport]") {
  for (std::size_t d : {1, 2, 3, 5})
    for (std::size_t f = 0; f < d * d; ++f) {
      const auto i = BellIndex::from_flat(f, d);
      CHECK(i.n < d);
      CHECK(i.m < d);
      CHECK(i.flat(d) == f);
    }
}

TEST_CASE("correction unitaries", "[teleport]") {
  CHECK(max_diff(correction_unitary(3, 0, 0), Matrix::Identity(3, 3)) == 0.0);
  CHECK(max_diff(correction_unitary(2, 1, 0), corpus::pauli_z()) < 1e-15);
  CHECK(max_diff(correction_unitary(2, 0, 1), corpus::pauli_x()) < 1e-15);
  const Matrix u = correction_unitary(3, 1, 2);
  CHECK(max_diff(u.adjoint() * u, Matrix::Identity(3, 3)) < 1e-12);
  for (std::size_t d : {2, 3, 4})
    for (std::size_t f = 0; f < d * d; ++f) {
      const Matrix v = correction_unitary(d, f);
      CHECK(max_diff(v * v.adjoint(), Matrix::Identity(d, d)) < 1e-12);
    }
  CHECK_THROWS_AS(correction_unitary(2, 0, 2), IndexOutOfRange);
  CHECK_THROWS_AS(correction_unitary(2, 4), IndexOutOfRange);
}

TEST_CASE("Bell measurement identifies Bell states", "[teleport]") {
  for (std::size_t d : {2, 3}) {
    const auto inst = bsm_instrument(d, "a", "b", "msg");
    REQUIRE(inst.size() == d * d);
    CHECK(is_cptp(inst.sum()).cptp());
    CHECK(check_instrument(inst).valid());
    for (std::size_t f = 0; f < d * d; ++f) {
      const auto i = BellIndex::from_flat(f, d);
      const auto input = LabeledOperator::projector({{"a", d}, {"b", d}}, bell_state(d, i.n, i.m));
      for (std::size_t g = 0; g < d * d; ++g) {
        const auto out = apply_channel(inst[g], input);
        CHECK(std::abs(out.trace() - (f == g ? 1.0 : 0.0)) < 1e-12);
        if (f == g) CHECK(max_diff(out.data(), message_projector(d, f)) < 1e-12);
      }
    }
  }
}

TEST_CASE("Bell measurement on the teleportation configuration is uniform", "[teleport]") {
  for (std::size_t d : {2, 3}) {
    const auto phi = LabeledOperator::projector({{"a", d}}, random_pure_state(d, d));
    const auto input = tensor_product(phi, max_entangled_state(d, "b", "c"));
    const std::vector<std::string> keep_c{"c"};
    for (std::size_t f = 0; f < d * d; ++f) {
      const auto e = bsm_element(d, f, "a", "b", "msg");
      const auto out = contract(FactorNetwork({input, e.op()}));
      CHECK(std::abs(out.trace() - 1.0 / double(d * d)) < 1e-12);
    }
    const auto ps = contract(FactorNetwork({input, bsm_postselect0(d, "a", "b").op()}));
    CHECK(std::abs(ps.trace() - 1.0 / double(d * d)) < 1e-12);
  }
}

TEST_CASE("post-selected Bell measurement", "[teleport]") {
  const auto ps = bsm_postselect0(2, "a", "b");
  CHECK(ps.out_labels().empty());
  CHECK(min_hermitian_eigenvalue(ps.op().data()) > -1e-12);
  const auto phi = LabeledOperator::projector({{"a", 2}, {"b", 2}}, bell_state(2, 0, 0));
  CHECK(std::abs(link(phi, ps.op()).value() - 1.0) < 1e-12);
  const auto other = LabeledOperator::projector({{"a", 2}, {"b", 2}}, bell_state(2, 0, 1));
  CHECK(std::abs(link(other, ps.op()).value()) < 1e-12);

  // Outcome 0 of the message-emitting measurement with the message discarded.
  for (std::size_t d : {2, 3}) {
    const std::vector<std::string> msg{"msg"};
    const auto discarded = partial_trace(bsm_element(d, 0, "a", "b", "msg").op(), msg);
    CHECK(max_abs_diff(discarded, bsm_postselect0(d, "a", "b").op()) < 1e-12);
  }
}

TEST_CASE("controlled correction", "[teleport]") {
  for (std::size_t d : {2, 3}) {
    const auto cu = cu_instrument(d, "msg", "p", "out");
    CHECK(is_cptp(cu).cptp());
    const auto rho = random_state(d, 4, "p");
    for (std::size_t f = 0; f < d * d; ++f) {
      const auto input = tensor_product(LabeledOperator({{"msg", d * d}}, message_projector(d, f)), rho);
      const auto out = apply_channel(cu, input);
      const Matrix u = correction_unitary(d, f);
      CHECK(max_diff(out.data(), u * rho.data() * u.adjoint()) < 1e-12);
      CHECK(max_abs_diff(apply_channel(cu_element(d, f, "msg", "p", "out"), input), out) < 1e-12);
    }
    const auto zero = tensor_product(LabeledOperator({{"msg", d * d}}, message_projector(d, 0)), rho);
    CHECK(max_diff(apply_channel(cu, zero).data(), rho.data()) < 1e-12);
  }
}

TEST_CASE("conditional states match the analytic expression", "[teleport][property]") {
  for (std::size_t d : {2, 3, 4}) {
    const Vector phi = random_pure_state(d, 10 + d);
    const auto input = LabeledOperator::projector({{"A", d}}, phi);
    const auto pair = max_entangled_state(d, "A'", "B");
    for (std::size_t f = 0; f < d * d; ++f) {
      const auto i = BellIndex::from_flat(f, d);
      const Vector psi = bell_state(d, i.n, i.m);
      const auto effect = povm_element(psi * psi.adjoint(), {{"A", d}, {"A'", d}});
      const auto out = contract(FactorNetwork({input, pair, effect.op()}));
      const Vector v = oracle::teleport_conditional_state(phi, i.n, i.m);
      CHECK(max_diff(out.data(), v * v.adjoint()) < 1e-12);
      const Vector corrected = correction_unitary(d, i.n, i.m) * v;
      CHECK((corrected * double(d) - phi).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("teleportation identity at the Choi level", "[teleport][property]") {
  for (std::size_t d : {2, 3}) {
    const auto expected = unnormalized_me_vector_op(d, "in", "out").scaled(1.0 / double(d * d));
    for (std::size_t f = 0; f < d * d; ++f) {
      const auto v = contract(FactorNetwork({max_entangled_state(d, "p", "q"),
                                             bsm_element(d, f, "in", "p", "msg").op(),
                                             cu_element(d, f, "msg", "q", "out").op()}));
      CHECK(max_abs_diff(v, expected) < 1e-12);
      const auto full = contract(FactorNetwork({max_entangled_state(d, "p", "q"),
                                                bsm_element(d, f, "in", "p", "msg").op(),
                                                cu_instrument(d, "msg", "q", "out").op()}));
      CHECK(max_abs_diff(full, expected) < 1e-12);
    }
  }
}

TEST_CASE("state teleportation demo", "[teleport]") {
  Vector zero = Vector::Zero(2);
  zero(0) = 1.0;
  const auto r2 = teleport_state_demo(2, zero);
  REQUIRE(r2.outcomes.size() == 4);
  for (const auto& o : r2.outcomes) {
    CHECK(std::abs(o.probability - 0.25) < 1e-10);
    CHECK(std::abs(o.fidelity - 1.0) < 1e-10);
  }
  const auto r3 = teleport_state_demo(3, random_pure_state(3, 5));
  REQUIRE(r3.outcomes.size() == 9);
  for (const auto& o : r3.outcomes) {
    CHECK(std::abs(o.probability - 1.0 / 9.0) < 1e-10);
    CHECK(std::abs(o.fidelity - 1.0) < 1e-10);
  }
  CHECK(std::abs(r3.outcomes[0].uncorrected_fidelity - 1.0) < 1e-10);
  CHECK(r3.min_fidelity > 1.0 - 1e-10);
  CHECK(r3.max_probability_error < 1e-10);
  CHECK(r3.to_json()["outcomes"].size() == 9);

  const auto r1 = teleport_state_demo(1, Vector::Ones(1));
  REQUIRE(r1.outcomes.size() == 1);
  CHECK(std::abs(r1.outcomes[0].probability - 1.0) < 1e-12);

  CHECK_THROWS_AS(teleport_state_demo(2, Vector::Ones(2)), BadState);
  CHECK_THROWS_AS(teleport_state_demo(2, Vector::Ones(3) / std::sqrt(3.0)), BadState);
  CHECK_THROWS_AS(teleport_state_demo(0, Vector::Ones(1)), BadDimension);
}
