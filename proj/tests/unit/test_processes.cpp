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

#include "corpus.hpp"
#include "cts/link.hpp"
#include "oracles.hpp"

using namespace cts;

namespace {

oracle::Op as_oracle(const LabeledOperator& a) {
  oracle::Op o{{}, a.data()};
  for (const auto& l : a.labels()) o.spaces.push_back({l.name, l.dim});
  return o;
}

double born_oracle(const ProcessMatrix& w, const std::vector<ChoiOperator>& elements) {
  std::vector<oracle::Op> ops;
  for (const auto& e : elements) ops.push_back(as_oracle(e.op()));
  return oracle::born(as_oracle(w.op()), ops).real();
}

Matrix ket_bra(std::size_t d, std::size_t i, std::size_t j) {
  Matrix m = Matrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

ChoiOperator unitary_choi(const Matrix& u, const std::string& in, const std::string& out) {
  const Matrix k[] = {u};
  return choi_from_kraus(k, SpaceLabel{in, std::size_t(u.cols())},
                         SpaceLabel{out, std::size_t(u.rows())});
}

// Composition of the single-label projectors, straight from their definition.
LabeledOperator subset_projection_oracle(const LabeledOperator& w, const PartyLayout& layout,
                                         const std::vector<std::size_t>& subset) {
  auto x = w;
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const bool in_r = std::find(subset.begin(), subset.end(), k) != subset.end();
    const auto& p = layout[k];
    if (in_r) {
      // 1 - _{O_j} with O_j the joint output of the party
      auto d = x;
      for (const auto& o : p.outputs) d = depolarize_on(d, o.name);
      x = x - d;
    } else {
      for (const auto& l : p.inputs) x = depolarize_on(x, l.name);
      for (const auto& l : p.outputs) x = depolarize_on(x, l.name);
    }
  }
  return x;
}

std::vector<corpus::NamedProcess> valid_corpus() {
  std::vector<corpus::NamedProcess> out;
  for (std::uint64_t s = 0; s < 4; ++s)
    for (auto& p : corpus::builtins(s)) out.push_back(std::move(p));
  for (std::uint64_t s = 0; s < 8; ++s) {
    if (s % 4 == 0)
      out.push_back({"qutrit-state", build_state_process(random_state(3, s).data(), 2)});
    else if (s % 4 == 1)
      out.push_back({"measure-comb",
                     build_channel_comb(random_cptp(2, 3, s, "A.O", "B.I"),
                                        random_state(2, s).data(), {.measurement_only = true})});
    else if (s % 4 == 2)
      out.push_back({"qutrit-switch", build_quantum_switch(3, random_state(2, s).data())});
    else
      out.push_back({"comb-3", build_channel_comb(random_cptp(3, 2, s, "A.O", "B.I"),
                                                  random_state(3, s).data())});
  }
  return out;
}

}  // namespace

TEST_CASE("Born rule on a prepared basis state", "[processes]") {
  const auto w = build_state_process(ket_bra(2, 0, 0));
  const Matrix fire[] = {ket_bra(2, 0, 0)};
  const auto yes = choi_from_kraus(fire, SpaceLabel{"A.I", 2}, SpaceLabel{"A.O", 2});
  const ChoiOperator e1[] = {yes};
  CHECK(std::abs(probability(w, e1) - 1.0) < 1e-12);
  const Matrix miss[] = {ket_bra(2, 0, 1)};
  const ChoiOperator e0[] = {
      choi_from_kraus(miss, SpaceLabel{"A.I", 2}, SpaceLabel{"A.O", 2})};
  CHECK(std::abs(probability(w, e0)) < 1e-12);
}

TEST_CASE("probability is Tr[W^T (x) M]", "[processes]") {
  for (std::uint64_t s = 0; s < 5; ++s)
    for (const auto& [name, w] : corpus::builtins(s)) {
      std::vector<ChoiOperator> elements;
      for (std::size_t k = 0; k < w.layout().size(); ++k)
        elements.push_back(corpus::party_instrument(w.layout()[k], 2, s * 10 + k)[0]);
      CHECK(std::abs(probability(w, elements) - born_oracle(w, elements)) < 1e-12);
    }
  // A complex state: W carries rho itself, not its transpose.
  const auto rho = random_state(2, 3, "A.I");
  REQUIRE(rho.data().imag().cwiseAbs().maxCoeff() > 1e-3);
  const auto w = build_state_process(rho.data());
  const Vector v = random_pure_state(2, 8);
  const ChoiOperator m[] = {ChoiOperator(
      tensor_product(povm_element(v * v.adjoint(), {{"A.I", 2}}).op(),
                     LabeledOperator::identity({{"A.O", 2}}).scaled(0.5)),
      {"A.I"}, {"A.O"})};
  CHECK(std::abs(probability(w, m) - (v.adjoint() * rho.data() * v)(0, 0).real()) < 1e-12);
}

TEST_CASE("switch with identity channels fires the plus outcome", "[processes]") {
  const auto w = build_quantum_switch(2, corpus::plus_state());
  const auto id_a = unitary_choi(Matrix::Identity(2, 2), "A.I", "A.O");
  const auto id_b = unitary_choi(Matrix::Identity(2, 2), "B.I", "B.O");
  const auto plus = povm_element(oracle::kron(corpus::plus_state(), Matrix::Identity(2, 2)),
                                 {{"F.I", 4}});
  const auto minus = povm_element(oracle::kron(corpus::minus_state(), Matrix::Identity(2, 2)),
                                  {{"F.I", 4}});
  const auto f_out = LabeledOperator::identity({{"F.O", 1}});
  auto with_out = [&](const ChoiOperator& e) {
    return ChoiOperator(tensor_product(e.op(), f_out), e.in_labels(), {"F.O"});
  };
  const ChoiOperator yes[] = {id_a, id_b, with_out(plus)};
  const ChoiOperator no[] = {id_a, id_b, with_out(minus)};
  CHECK(std::abs(probability(w, yes) - 1.0) < 1e-12);
  CHECK(std::abs(probability(w, no)) < 1e-12);
}

TEST_CASE("switch matches the state-vector circuit", "[processes]") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Vector control = random_pure_state(2, s);
    const Vector target = random_pure_state(2, s + 100);
    const auto w = build_quantum_switch(2, control * control.adjoint(),
                                        Matrix(target * target.adjoint()));
    const Matrix ua = random_unitary(2, s + 200), ub = random_unitary(2, s + 300);
    const Vector e = random_pure_state(4, s + 400);
    const auto f = ChoiOperator(
        tensor_product(povm_element(e * e.adjoint(), {{"F.I", 4}}).op(),
                       LabeledOperator::identity({{"F.O", 1}})),
        {"F.I"}, {"F.O"});
    const ChoiOperator m[] = {unitary_choi(ua, "A.I", "A.O"), unitary_choi(ub, "B.I", "B.O"), f};
    const Vector out = oracle::switch_output(control, target, ua, ub);
    CHECK(std::abs(probability(w, m) - std::norm(e.dot(out))) < 1e-12);
  }
}

TEST_CASE("switch of X and Z fires the minus outcome", "[processes]") {
  const auto w = build_quantum_switch(2, corpus::plus_state());
  const auto minus = oracle::kron(corpus::minus_state(), Matrix::Identity(2, 2));
  const ChoiOperator m[] = {
      unitary_choi(corpus::pauli_x(), "A.I", "A.O"), unitary_choi(corpus::pauli_z(), "B.I", "B.O"),
      ChoiOperator(tensor_product(povm_element(minus, {{"F.I", 4}}).op(),
                                  LabeledOperator::identity({{"F.O", 1}})),
                   {"F.I"}, {"F.O"})};
  CHECK(std::abs(probability(w, m) - 1.0) < 1e-12);
}

TEST_CASE("probability checks element labels", "[processes]") {
  const auto w = corpus::state(1);
  const ChoiOperator wrong[] = {random_cptp(2, 2, 1, "X.I", "X.O")};
  CHECK_THROWS_AS(probability(w, wrong), LabelMismatch);
  CHECK_THROWS_AS(probability(w, std::span<const ChoiOperator>{}), LabelMismatch);
}

TEST_CASE("probability is multilinear", "[processes][property]") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto w = corpus::comb(s);
    const auto m1 = random_cptp(2, 2, s, "A.I", "A.O");
    const auto m1p = random_instrument(2, 2, 2, s + 1, "A.I", "A.O")[0];
    const auto m2 = random_instrument(2, 2, 3, s + 2, "B.I", "B.O")[1];
    const double alpha = 0.3 + 0.1 * double(s), beta = -1.7;
    const ChoiOperator mix[] = {m1.scaled(alpha) + m1p.scaled(beta), m2};
    const ChoiOperator a[] = {m1, m2}, b[] = {m1p, m2};
    CHECK(std::abs(probability(w, mix) - (alpha * probability(w, a) + beta * probability(w, b))) <
          1e-10);
  }
}

TEST_CASE("instrument statistics form a distribution", "[processes][property]") {
  for (std::uint64_t s = 0; s < 10; ++s)
    for (const auto& [name, w] : corpus::builtins(s)) {
      std::vector<Instrument> instruments;
      for (std::size_t k = 0; k < w.layout().size(); ++k)
        instruments.push_back(corpus::party_instrument(w.layout()[k], 1 + (s + k) % 3, s + k));
      const auto table = outcome_distribution(w, instruments);
      double total = 0.0;
      for (double p : table.probabilities) {
        CHECK(p >= -1e-10);
        total += p;
      }
      CHECK(std::abs(total - 1.0) < 1e-9);
    }
}

TEST_CASE("outcome tuples run last index fastest", "[processes]") {
  const std::size_t sizes[] = {2, 3};
  const auto t = outcome_tuples(sizes);
  REQUIRE(t.size() == 6);
  CHECK(t[1] == std::vector<std::size_t>{0, 1});
  CHECK(t[3] == std::vector<std::size_t>{1, 0});
}

TEST_CASE("builders pass validation", "[processes]") {
  const auto state = build_state_process(ket_bra(2, 0, 0));
  CHECK(std::abs(state.op().trace() - 2.0) < 1e-12);
  for (const auto& [name, w] : valid_corpus()) {
    INFO(name);
    const auto r = validate_process(w, 1e-9);
    CHECK(r.valid());
    CHECK(r.psd_method == "eigen");
    CHECK(std::abs(r.trace - double(w.layout().output_dim_product())) < 1e-9);
  }
  CHECK_THROWS_AS(build_state_process(Matrix::Identity(2, 2)), InvalidInput);
  CHECK_THROWS_AS(build_channel_comb(random_cptp(2, 2, 1, "A.O", "B.I").scaled(0.5),
                                     ket_bra(2, 0, 0)),
                  InvalidInput);
  CHECK_THROWS_AS(build_quantum_switch(2, Matrix::Identity(3, 3) / 3.0), InvalidInput);
}

TEST_CASE("identity comb transmits the prepared state", "[processes]") {
  const Vector psi = random_pure_state(2, 4);
  const auto w = build_channel_comb(unitary_choi(Matrix::Identity(2, 2), "A.O", "B.I"),
                                    psi * psi.adjoint());
  const auto id = unitary_choi(Matrix::Identity(2, 2), "A.I", "A.O");
  const auto measure = ChoiOperator(
      tensor_product(povm_element(psi * psi.adjoint(), {{"B.I", 2}}).op(),
                     LabeledOperator::identity({{"B.O", 2}}).scaled(0.5)),
      {"B.I"}, {"B.O"});
  const ChoiOperator m[] = {id, measure};
  CHECK(std::abs(probability(w, m) - 1.0) < 1e-12);
  CHECK(validate_process(w).valid());
}

TEST_CASE("subset projection composes the single-label projectors", "[processes]") {
  for (const auto& [name, w] : corpus::builtins(2))
    for (const auto& r : corpus::subsets(w.layout().size())) {
      const auto h = LabeledOperator(w.op().labels(), corpus::random_hermitian(w.op().dim(), 9));
      CHECK(max_abs_diff(subset_projection(h, w.layout(), r),
                         subset_projection_oracle(h, w.layout(), r)) < 1e-12);
    }
}

TEST_CASE("a constructed violation is reported with its subset", "[processes]") {
  for (const auto& [name, w] : corpus::builtins(3))
    for (const auto& r : corpus::subsets(w.layout().size())) {
      auto bad = w;
      if (!corpus::violator(w, r, 11, bad)) continue;
      INFO(name);
      const auto report = validate_process(bad, 1e-9);
      CHECK_FALSE(report.conditions_ok);
      std::vector<std::string> names;
      for (auto k : r) names.push_back(w.layout()[k].name);
      bool found = false;
      for (const auto& c : report.conditions) {
        if (c.parties != names) continue;
        found = true;
        CHECK_FALSE(c.ok);
        const auto x = subset_projection(bad.op(), bad.layout(), r);
        CHECK(std::abs(c.residual - max_abs(x)) < 1e-12);
      }
      CHECK(found);
      CHECK(report.trace_ok);
    }
}

TEST_CASE("scaled processes fail the trace rule and sampling", "[processes]") {
  const auto w = corpus::comb(4);
  const ProcessMatrix scaled(w.op().scaled(1.1), w.layout());
  const auto r = validate_process(scaled);
  CHECK_FALSE(r.trace_ok);
  CHECK(std::abs(r.trace_deviation - 0.1 * 4.0) < 1e-9);
  const auto s = validate_by_sampling(scaled, 50, 7);
  CHECK_FALSE(s.ok);
  for (double d : s.deviations) CHECK(std::abs(d - 0.1) < 1e-9);
  CHECK(r.to_json()["characterization"] == "conditions per cited characterization");
}

TEST_CASE("sampling normalizes valid processes", "[processes]") {
  for (const auto& [name, w] : corpus::builtins(5)) {
    INFO(name);
    const auto r = validate_by_sampling(w, 50, 42);
    CHECK(r.ok);
    CHECK(r.max_deviation <= 1e-9);
    CHECK(r.deviations.size() == 50);
  }
  CHECK_THROWS_AS(validate_by_sampling(corpus::state(1), 0, 1), InvalidInput);
}

TEST_CASE("sampling is reproducible", "[processes]") {
  const auto w = corpus::quantum_switch(1);
  CHECK(validate_by_sampling(w, 5, 3).deviations == validate_by_sampling(w, 5, 3).deviations);
}

TEST_CASE("ancilla sampling", "[processes]") {
  const auto state = build_state_process(random_state(2, 1).data());
  const std::size_t two[] = {2};
  CHECK(validate_with_ancillas(state, two, 50, 1).max_deviation <= 1e-9);

  const auto comb = corpus::comb(6);
  const std::size_t one_one[] = {1, 1}, two_two[] = {2, 2};
  CHECK(validate_with_ancillas(comb, one_one, 10, 8).deviations ==
        validate_by_sampling(comb, 10, 8).deviations);
  const auto r = validate_with_ancillas(comb, two_two, 50, 9);
  CHECK(r.ok);
  CHECK(r.max_deviation <= 1e-9);

  const std::size_t wrong[] = {2};
  CHECK_THROWS_AS(validate_with_ancillas(comb, wrong, 1, 1), InvalidInput);
  const std::size_t zero[] = {0, 1};
  CHECK_THROWS_AS(validate_with_ancillas(comb, zero, 1, 1), BadDimension);
}

TEST_CASE("projector check and sampling agree on a corpus", "[processes][property]") {
  const double tol = 1e-7;
  auto valid = valid_corpus();
  REQUIRE(valid.size() == 20);
  std::vector<corpus::NamedProcess> invalid;
  for (std::uint64_t s = 0; invalid.size() < 20; ++s) {
    const auto& base = valid[s % valid.size()];
    const auto subsets = corpus::subsets(base.w.layout().size());
    auto bad = base.w;
    if (corpus::violator(base.w, subsets[s % subsets.size()], s, bad))
      invalid.push_back({base.name + "-violated", bad});
  }
  std::size_t disagreements = 0;
  for (const auto* set : {&valid, &invalid})
    for (const auto& [name, w] : *set) {
      const bool certified = validate_process(w, tol).normalized();
      const bool sampled = validate_by_sampling(w, 50, 1234, tol).ok;
      if (certified != sampled) {
        UNSCOPED_INFO("disagreement on " << name);
        ++disagreements;
      }
      CHECK(certified == (set == &valid));
    }
  CHECK(disagreements == 0);
}

TEST_CASE("layouts reject duplicates", "[processes]") {
  const Party a{"A", {{"x", 2}}, {{"y", 2}}};
  CHECK_THROWS_AS(PartyLayout({a, a}), LabelCollision);
  CHECK_THROWS_AS(PartyLayout({a, Party{"B", {{"x", 2}}, {}}}), LabelCollision);
  CHECK_THROWS_AS(ProcessMatrix(LabeledOperator::identity({{"x", 2}}), PartyLayout({a})),
                  LabelMismatch);
}
