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

#include "cts/process.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <set>

#include "cts/link.hpp"

#ifdef CTS_HAVE_LAPACKE
#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>
#endif
#include "index_maps.hpp"

namespace cts {

namespace {

std::vector<std::string> names_of(const Labels& labels) {
  std::vector<std::string> n;
  for (const auto& l : labels) n.push_back(l.name);
  return n;
}

bool same_spaces(const Labels& a, const Labels& b) {
  if (a.size() != b.size()) return false;
  return std::all_of(a.begin(), a.end(), [&](const SpaceLabel& l) {
    return std::find(b.begin(), b.end(), l) != b.end();
  });
}

// _{X_1 ... X_k} applied jointly: trace out the group and refill it with the
// normalized identity.
LabeledOperator depolarize_group(const LabeledOperator& x,
                                 const std::vector<std::string>& names) {
  if (names.empty()) return x;
  Labels spaces;
  for (const auto& n : names) spaces.push_back(x.label(n));
  auto reduced = partial_trace(x, names);
  auto mixed = LabeledOperator::identity(spaces).scaled(1.0 / double(total_dim(spaces)));
  return permute_labels(tensor_product(mixed, reduced), x.label_names());
}

// x - _G x for a label group G, without materializing _G x.
LabeledOperator residual_group(const LabeledOperator& x, const std::vector<std::string>& group) {
  if (group.empty()) return LabeledOperator(x.labels(), Matrix::Zero(x.dim(), x.dim()));
  std::vector<std::size_t> gpos, rpos;
  for (std::size_t k = 0; k < x.labels().size(); ++k) {
    const bool in_group =
        std::find(group.begin(), group.end(), x.labels()[k].name) != group.end();
    (in_group ? gpos : rpos).push_back(k);
  }
  const auto go = detail::offset_map(x.labels(), gpos);
  const auto ro = detail::offset_map(x.labels(), rpos);
  const auto nr = static_cast<Eigen::Index>(ro.size());
  const double scale = 1.0 / double(go.size());
  Matrix m = x.data();
  Matrix t = Matrix::Zero(nr, nr);
  for (Eigen::Index b = 0; b < nr; ++b)
    for (auto g : go)
      for (Eigen::Index a = 0; a < nr; ++a) t(a, b) += m(ro[a] + g, ro[b] + g);
  t *= scale;
  for (Eigen::Index b = 0; b < nr; ++b)
    for (auto g : go)
      for (Eigen::Index a = 0; a < nr; ++a) m(ro[a] + g, ro[b] + g) -= t(a, b);
  return {x.labels(), std::move(m)};
}

// Succeeds iff m is positive definite (up to rounding).
bool cholesky_succeeds(Matrix m) {
#ifdef CTS_HAVE_LAPACKE
  const auto n = static_cast<lapack_int>(m.rows());
  return LAPACKE_zpotrf(LAPACK_COL_MAJOR, 'L', n, m.data(), n) == 0;
#else
  Eigen::LLT<Matrix> llt(m);
  return llt.info() == Eigen::Success;
#endif
}

Matrix validated_density(const Matrix& rho, const char* what) {
  if (rho.rows() != rho.cols() || rho.rows() < 1)
    throw InvalidInput(std::string(what) + " must be a non-empty square matrix");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-9 ||
      std::abs(rho.trace() - Complex(1.0)) > 1e-9 || min_hermitian_eigenvalue(rho) < -1e-9)
    throw InvalidInput(std::string(what) + " must be a density matrix");
  return rho;
}

}  // namespace

std::vector<std::string> Party::input_names() const { return names_of(inputs); }
std::vector<std::string> Party::output_names() const { return names_of(outputs); }

PartyLayout::PartyLayout(std::vector<Party> parties) : parties_(std::move(parties)) {
  std::set<std::string> party_names;
  std::set<std::string> space_names;
  for (const auto& p : parties_) {
    if (p.name.empty()) throw InvalidInput("party with empty name");
    if (!party_names.insert(p.name).second)
      throw LabelCollision("party '" + p.name + "' appears twice");
    for (const auto* group : {&p.inputs, &p.outputs})
      for (const auto& l : *group) {
        if (l.dim < 1) throw BadDimension("space '" + l.name + "' has dimension 0");
        if (!space_names.insert(l.name).second)
          throw LabelCollision("space '" + l.name + "' appears twice in the layout");
      }
  }
}

std::optional<std::size_t> PartyLayout::index_of(std::string_view party) const {
  for (std::size_t k = 0; k < parties_.size(); ++k)
    if (parties_[k].name == party) return k;
  return std::nullopt;
}

Labels PartyLayout::all_labels() const {
  Labels all;
  for (const auto& p : parties_) {
    all.insert(all.end(), p.inputs.begin(), p.inputs.end());
    all.insert(all.end(), p.outputs.begin(), p.outputs.end());
  }
  return all;
}

std::size_t PartyLayout::output_dim_product() const {
  std::size_t d = 1;
  for (const auto& p : parties_) d *= p.out_dim();
  return d;
}

ProcessMatrix::ProcessMatrix(LabeledOperator op, PartyLayout layout)
    : op_(std::move(op)), layout_(std::move(layout)) {
  if (!same_spaces(op_.labels(), layout_.all_labels()))
    throw LabelMismatch("process matrix labels must be exactly the layout's spaces");
}

double probability(const ProcessMatrix& w, std::span<const ChoiOperator> elements) {
  const auto& layout = w.layout();
  if (elements.size() != layout.size())
    throw LabelMismatch("expected " + std::to_string(layout.size()) +
                        " party elements, got " + std::to_string(elements.size()));
  FactorNetwork net;
  net.add(w.op());
  for (std::size_t k = 0; k < elements.size(); ++k) {
    const auto& p = layout[k];
    if (!same_spaces(elements[k].in_spaces(), p.inputs) ||
        !same_spaces(elements[k].out_spaces(), p.outputs))
      throw LabelMismatch("element for party '" + p.name + "' does not match its spaces");
    net.add(elements[k].op());
  }
  return contract(net).value().real();
}

std::vector<std::vector<std::size_t>> outcome_tuples(std::span<const std::size_t> sizes) {
  std::vector<std::vector<std::size_t>> out{{}};
  for (auto n : sizes) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& t : out)
      for (std::size_t k = 0; k < n; ++k) {
        auto u = t;
        u.push_back(k);
        next.push_back(std::move(u));
      }
    out = std::move(next);
  }
  return out;
}

OutcomeTable outcome_distribution(const ProcessMatrix& w,
                                  std::span<const Instrument> instruments) {
  std::vector<std::size_t> sizes;
  for (const auto& i : instruments) sizes.push_back(i.size());
  OutcomeTable table;
  table.tuples = outcome_tuples(sizes);
  for (const auto& t : table.tuples) {
    std::vector<ChoiOperator> elements;
    for (std::size_t k = 0; k < t.size(); ++k) elements.push_back(instruments[k][t[k]]);
    table.probabilities.push_back(probability(w, elements));
  }
  return table;
}

LabeledOperator subset_projection(const LabeledOperator& w, const PartyLayout& layout,
                                  std::span<const std::size_t> subset) {
  std::vector<std::string> outside;
  for (std::size_t k = 0; k < layout.size(); ++k) {
    if (std::find(subset.begin(), subset.end(), k) != subset.end()) continue;
    for (const auto& n : layout[k].input_names()) outside.push_back(n);
    for (const auto& n : layout[k].output_names()) outside.push_back(n);
  }
  auto x = depolarize_group(w, outside);
  for (auto j : subset) {
    const auto dep = depolarize_group(x, layout[j].output_names());
    x = x - dep;
  }
  return x;
}

std::vector<std::string> ProcessReport::failures() const {
  std::vector<std::string> f;
  if (!psd_ok) f.push_back("psd");
  if (!trace_ok) f.push_back("trace");
  for (const auto& c : conditions) {
    if (c.ok) continue;
    std::string s = "subset{";
    for (std::size_t k = 0; k < c.parties.size(); ++k) s += (k ? "," : "") + c.parties[k];
    f.push_back(s + "}");
  }
  return f;
}

nlohmann::json ProcessReport::to_json() const {
  auto conds = nlohmann::json::array();
  for (const auto& c : conditions)
    conds.push_back({{"parties", c.parties}, {"residual", c.residual}, {"ok", c.ok}});
  nlohmann::json j{{"valid", valid()},
                   {"tol", tol},
                   {"psd", {{"ok", psd_ok}, {"method", psd_method}}},
                   {"trace",
                    {{"ok", trace_ok},
                     {"value", trace},
                     {"expected", expected_trace},
                     {"deviation", trace_deviation}}},
                   {"conditions", std::move(conds)},
                   {"characterization", "conditions per cited characterization"},
                   {"failures", failures()}};
  if (min_eigenvalue) j["psd"]["min_eigenvalue"] = *min_eigenvalue;
  return j;
}

ProcessReport validate_process(const ProcessMatrix& w, double tol) {
  ProcessReport r;
  r.tol = tol;
  const auto& m = w.op().data();
  if (w.op().dim() <= kEigenPsdLimit) {
    r.psd_method = "eigen";
    r.min_eigenvalue = min_hermitian_eigenvalue(m);
    r.psd_ok = *r.min_eigenvalue >= -tol;
  } else {
    r.psd_method = "cholesky";
    Matrix shifted = (m + m.adjoint()) / 2.0;
    shifted.diagonal().array() += tol;
    r.psd_ok = cholesky_succeeds(std::move(shifted));
  }
  r.trace = w.op().trace().real();
  r.expected_trace = double(w.layout().output_dim_product());
  r.trace_deviation = std::abs(w.op().trace() - Complex(r.expected_trace));
  r.trace_ok = r.trace_deviation <= tol * r.expected_trace;

  // The projection for R is 1/d (x) Y_R with Y_R the residual of the reduced
  // operator on the parties in R, so its largest entry is max|Y_R| / d.
  const auto& layout = w.layout();
  const auto n = layout.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    SubsetCondition c;
    std::vector<std::string> outside;
    double d_outside = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto& p = layout[k];
      if (mask & (std::size_t{1} << k)) {
        c.parties.push_back(p.name);
        continue;
      }
      for (const auto& x : p.input_names()) outside.push_back(x);
      for (const auto& x : p.output_names()) outside.push_back(x);
      d_outside *= double(p.in_dim() * p.out_dim());
    }
    auto y = partial_trace(w.op(), outside);
    for (std::size_t k = 0; k < n; ++k)
      if (mask & (std::size_t{1} << k)) y = residual_group(y, layout[k].output_names());
    c.residual = max_abs(y) / d_outside;
    c.ok = c.residual <= tol;
    r.conditions_ok = r.conditions_ok && c.ok;
    r.conditions.push_back(std::move(c));
  }
  return r;
}

nlohmann::json SamplingReport::to_json() const {
  return {{"samples", samples},
          {"tol", tol},
          {"max_deviation", max_deviation},
          {"worst_sample", worst_sample},
          {"ok", ok}};
}

namespace {

// Tr[W^T (X (x) Y)] = sum_ij X_ij Tr[W_ij^T Y] over the Y-sized blocks W_ij.
Complex product_overlap(const Matrix& w, const Matrix& x, const Matrix& y) {
  const auto ny = y.rows();
  Complex p = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (x(i, j) == Complex(0.0)) continue;
      p += x(i, j) * (w.block(i * ny, j * ny, ny, ny).array() * y.array()).sum();
    }
  return p;
}

SamplingReport sample_normalization(const ProcessMatrix& w,
                                    std::span<const std::size_t> ancilla_dims,
                                    std::size_t n_samples, std::uint64_t seed, double tol) {
  const auto& layout = w.layout();
  if (n_samples < 1) throw InvalidInput("sampling needs at least one sample");
  if (ancilla_dims.size() != layout.size())
    throw InvalidInput("one ancilla dimension per party is required");

  Labels ancillas;  // joint ancilla state spaces, parties with dim 1 omitted
  std::vector<std::optional<SpaceLabel>> party_ancilla;
  for (std::size_t k = 0; k < layout.size(); ++k) {
    if (ancilla_dims[k] < 1) throw BadDimension("ancilla dimension must be >= 1");
    if (ancilla_dims[k] == 1) {
      party_ancilla.emplace_back();
      continue;
    }
    SpaceLabel a{layout[k].name + ".anc", ancilla_dims[k]};
    if (w.op().has_label(a.name)) throw LabelCollision("ancilla label '" + a.name + "' is taken");
    ancillas.push_back(a);
    party_ancilla.emplace_back(a);
  }

  // Ancilla state first (if any), then one random channel per party.
  auto strategy = [&](std::size_t s) {
    std::vector<LabeledOperator> f;
    if (!ancillas.empty())
      f.push_back(reshape_labels(random_state(total_dim(ancillas), derive_seed(seed, 0, s)),
                                 ancillas));
    for (std::size_t k = 0; k < layout.size(); ++k) {
      const auto& p = layout[k];
      Labels in = p.inputs;
      if (party_ancilla[k]) in.push_back(*party_ancilla[k]);
      auto c = random_cptp(total_dim(in), p.out_dim(), derive_seed(seed, k + 1, s));
      f.push_back(c.reshaped(std::move(in), p.outputs).op());
    }
    return f;
  };

  // Without ancillas the strategy is a product X (x) Y of the leading and the
  // trailing channels, so Tr[W^T (X (x) Y)] is read off W block by block.
  std::size_t split = 0;
  if (ancillas.empty()) {
    const double target = std::sqrt(double(w.op().dim()));
    double side = 1.0;
    while (split < layout.size() && side < target) {
      side *= double(layout[split].in_dim() * layout[split].out_dim());
      ++split;
    }
  }
  auto product = [](auto first, auto last) {
    auto acc = LabeledOperator::scalar(1.0);
    for (; first != last; ++first) acc = tensor_product(acc, *first);
    return acc;
  };

  SamplingReport r;
  r.samples = n_samples;
  r.tol = tol;
  LabeledOperator aligned;
  ContractionPlan plan;
  for (std::size_t s = 0; s < n_samples; ++s) {
    auto f = strategy(s);
    Complex p;
    if (ancillas.empty()) {
      const auto x = product(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(split));
      const auto y = product(f.begin() + static_cast<std::ptrdiff_t>(split), f.end());
      if (s == 0) {
        auto order = x.label_names();
        for (const auto& n : y.label_names()) order.push_back(n);
        aligned = permute_labels(w.op(), order);
      }
      p = product_overlap(aligned.data(), x.data(), y.data());
    } else {
      FactorNetwork net({w.op()});
      for (auto& op : f) net.add(std::move(op));
      if (s == 0) plan = plan_contraction(net);
      p = contract(net, plan).value();
    }
    const double dev = std::abs(p - Complex(1.0));
    r.deviations.push_back(dev);
    if (dev > r.max_deviation || s == 0) {
      r.max_deviation = dev;
      r.worst_sample = s;
    }
  }
  r.ok = r.max_deviation <= tol;
  return r;
}

}  // namespace

SamplingReport validate_by_sampling(const ProcessMatrix& w, std::size_t n_samples,
                                    std::uint64_t seed, double tol) {
  std::vector<std::size_t> ones(w.layout().size(), 1);
  return sample_normalization(w, ones, n_samples, seed, tol);
}

SamplingReport validate_with_ancillas(const ProcessMatrix& w,
                                      std::span<const std::size_t> ancilla_dims,
                                      std::size_t n_samples, std::uint64_t seed,
                                      double tol) {
  return sample_normalization(w, ancilla_dims, n_samples, seed, tol);
}

ProcessMatrix build_state_process(const Matrix& rho, std::optional<std::size_t> d_out) {
  const auto state = validated_density(rho, "state");
  const auto d = static_cast<std::size_t>(state.rows());
  const auto out = d_out.value_or(d);
  if (out < 1) throw InvalidInput("output dimension must be >= 1");
  SpaceLabel in_space{"A.I", d};
  SpaceLabel out_space{"A.O", out};
  auto op = tensor_product(LabeledOperator({in_space}, state),
                           LabeledOperator::identity({out_space}));
  return {std::move(op), PartyLayout({Party{"A", {in_space}, {out_space}}})};
}

ProcessMatrix build_channel_comb(const ChoiOperator& channel, const Matrix& rho,
                                 CombOptions options) {
  const auto state = validated_density(rho, "initial state");
  if (channel.in_labels().size() != 1 || channel.out_labels().size() != 1)
    throw InvalidInput("comb channel needs exactly one input and one output space");
  if (!is_cptp(channel).cptp()) throw InvalidInput("comb channel is not CPTP");
  const auto d_a_in = static_cast<std::size_t>(state.rows());
  SpaceLabel a_in{"A.I", d_a_in};
  SpaceLabel a_out{"A.O", channel.in_dim()};
  SpaceLabel b_in{"B.I", channel.out_dim()};
  SpaceLabel b_out{"B.O", options.measurement_only ? 1 : channel.out_dim()};
  auto wire = relabel(channel.op(), {{channel.in_labels()[0], a_out.name},
                                     {channel.out_labels()[0], b_in.name}});
  auto op = tensor_product(tensor_product(LabeledOperator({a_in}, state), wire),
                           LabeledOperator::identity({b_out}));
  return {std::move(op),
          PartyLayout({Party{"A", {a_in}, {a_out}}, Party{"B", {b_in}, {b_out}}})};
}

ProcessMatrix build_quantum_switch(std::size_t target_dim, const Matrix& control,
                                   std::optional<Matrix> target) {
  if (target_dim < 1) throw InvalidInput("switch target dimension must be >= 1");
  const auto ctrl = validated_density(control, "control state");
  if (ctrl.rows() != 2) throw InvalidInput("switch control must be a qubit state");
  const auto d = static_cast<Eigen::Index>(target_dim);
  Matrix tgt = Matrix::Zero(d, d);
  tgt(0, 0) = 1.0;
  if (target) tgt = validated_density(*target, "target state");
  if (tgt.rows() != d) throw InvalidInput("target state has the wrong dimension");

  const SpaceLabel a_in{"A.I", target_dim}, a_out{"A.O", target_dim};
  const SpaceLabel b_in{"B.I", target_dim}, b_out{"B.O", target_dim};
  const SpaceLabel f_in{"F.I", 2 * target_dim}, f_out{"F.O", 1};
  // Index over (A.I, A.O, B.I, B.O, F.I); F.O has dimension 1.
  auto index = [d](Eigen::Index ai, Eigen::Index ao, Eigen::Index bi, Eigen::Index bo,
                   Eigen::Index c, Eigen::Index t) {
    return ((((ai * d + ao) * d + bi) * d + bo) * 2 + c) * d + t;
  };
  const Eigen::Index dim = d * d * d * d * 2 * d;
  // Column c*d + k: process vector for initial control |c>, target |k>.
  Matrix branches = Matrix::Zero(dim, 2 * d);
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index x = 0; x < d; ++x)
      for (Eigen::Index t = 0; t < d; ++t) {
        branches(index(k, x, x, t, 0, t), k) = 1.0;      // A then B
        branches(index(x, t, k, x, 1, t), d + k) = 1.0;  // B then A
      }
  Matrix init(2 * d, 2 * d);
  for (Eigen::Index c = 0; c < 2; ++c)
    for (Eigen::Index cp = 0; cp < 2; ++cp) init.block(c * d, cp * d, d, d) = ctrl(c, cp) * tgt;
  Matrix w = branches * init * branches.adjoint();
  LabeledOperator op({a_in, a_out, b_in, b_out, f_in, f_out}, std::move(w));
  return {std::move(op), PartyLayout({Party{"A", {a_in}, {a_out}}, Party{"B", {b_in}, {b_out}},
                                      Party{"F", {f_in}, {f_out}}})};
}

}  // namespace cts
