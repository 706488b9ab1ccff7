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


#include "cts/protocols.hpp"

#include <algorithm>
#include <set>

#include "cts/errors.hpp"
#include "cts/teleport.hpp"

namespace cts {

namespace {

constexpr std::pair<PartyMode, std::string_view> kModeNames[] = {
    {PartyMode::Direct, "direct"},
    {PartyMode::Deterministic, "deterministic"},
    {PartyMode::FullPostSelect, "full_ps"},
    {PartyMode::PastPostSelect, "past_ps"},
    {PartyMode::FuturePostSelect, "future_ps"},
};

[[noreturn]] void mismatch(const Party& party, const std::string& what) {
  throw SpecMismatch("party '" + party.name + "': " + what);
}

bool same_spaces(const Labels& a, const Labels& b) {
  auto sorted = [](Labels l) {
    std::sort(l.begin(), l.end(),
              [](const SpaceLabel& x, const SpaceLabel& y) { return x.name < y.name; });
    return l;
  };
  return sorted(a) == sorted(b);
}

struct Slot {
  std::string in, out;
  std::size_t d_in = 1, d_out = 1;
};

Slot slot_of(const Party& party) {
  if (party.inputs.size() != 1 || party.outputs.size() != 1)
    mismatch(party, "teleported parties need exactly one input and one output space");
  return {party.inputs[0].name, party.outputs[0].name, party.inputs[0].dim,
          party.outputs[0].dim};
}

LabeledOperator identity_channel(std::size_t d, const std::string& from, const std::string& to) {
  return unnormalized_me_vector_op(d, from, to);
}

// The agent's element, moved from the slot to the outside lab.
LabeledOperator moved(const ChoiOperator& element, const Slot& s, const std::string& in,
                      const std::string& out) {
  return element.reshaped({{in, s.d_in}}, {{out, s.d_out}}).op();
}

void check_layout_matches(const ProcessMatrix& w, const PartyLayout& layout) {
  const auto& mine = w.layout();
  if (mine.size() != layout.size())
    throw SpecMismatch("scenario lists " + std::to_string(layout.size()) +
                       " parties, process has " + std::to_string(mine.size()));
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const auto& p = layout[k];
    const auto& q = mine[k];
    if (p.name != q.name)
      throw SpecMismatch("party '" + p.name + "': process expects party '" + q.name +
                         "' at position " + std::to_string(k));
    if (p.in_dim() != q.in_dim())
      mismatch(p, "d_in " + std::to_string(p.in_dim()) + " does not match the process (" +
                      std::to_string(q.in_dim()) + ")");
    if (p.out_dim() != q.out_dim())
      mismatch(p, "d_out " + std::to_string(p.out_dim()) + " does not match the process (" +
                      std::to_string(q.out_dim()) + ")");
    if (!same_spaces(p.inputs, q.inputs) || !same_spaces(p.outputs, q.outputs))
      mismatch(p, "spaces do not match the process");
  }
}

void check_fresh(const PartyLayout& layout, const std::vector<PartyMode>& modes) {
  std::set<std::string> taken;
  for (const auto& l : layout.all_labels()) taken.insert(l.name);
  for (std::size_t k = 0; k < layout.size(); ++k) {
    if (!teleports(modes[k])) continue;
    const auto n = wire_names(layout[k]);
    for (const auto* name : {&n.probe_in, &n.probe_in_far, &n.probe_out, &n.probe_out_far,
                             &n.lab_in, &n.lab_out, &n.msg_in, &n.msg_out, &n.outside_out,
                             &n.outside_in})
      if (!taken.insert(*name).second)
        mismatch(layout[k], "generated wire name '" + *name + "' is already in use");
  }
}

}  // namespace

std::string_view to_string(PartyMode mode) {
  for (const auto& [m, name] : kModeNames)
    if (m == mode) return name;
  return "unknown";
}

PartyMode parse_party_mode(std::string_view text) {
  for (const auto& [m, name] : kModeNames)
    if (name == text) return m;
  throw ParseError("unknown party mode '" + std::string(text) +
                   "' (expected direct, deterministic, full_ps, past_ps or future_ps)");
}

void ProtocolSpec::check() const {
  if (modes.size() != layout.size() || instruments.size() != layout.size())
    throw SpecMismatch("need one mode and one instrument per party");
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const auto& p = layout[k];
    if (instruments[k].size() == 0) mismatch(p, "instrument has no outcomes");
    const auto& e = instruments[k][0];
    if (e.in_dim() != p.in_dim())
      mismatch(p, "instrument input dimension " + std::to_string(e.in_dim()) +
                      " does not match d_in " + std::to_string(p.in_dim()));
    if (e.out_dim() != p.out_dim())
      mismatch(p, "instrument output dimension " + std::to_string(e.out_dim()) +
                      " does not match d_out " + std::to_string(p.out_dim()));
    if (!same_spaces(e.in_spaces(), p.inputs) || !same_spaces(e.out_spaces(), p.outputs))
      mismatch(p, "instrument is not over the party's spaces");
    if (teleports(modes[k])) slot_of(p);
  }
  check_fresh(layout, modes);
}

WireNames wire_names(const Party& party) {
  const auto& p = party.name;
  return {p + ".probe_in",  p + ".probe_in~", p + ".probe_out",   p + ".probe_out~",
          p + ".lab_in",    p + ".lab_out",   p + ".msg_in",      p + ".msg_out",
          p + ".outside_out", p + ".outside_in"};
}

FactorNetwork party_resources(const Party& party, PartyMode mode) {
  FactorNetwork net;
  if (!teleports(mode)) return net;
  const auto s = slot_of(party);
  const auto n = wire_names(party);
  net.add(max_entangled_state(s.d_in, n.probe_in, n.probe_in_far));
  net.add(max_entangled_state(s.d_out, n.probe_out, n.probe_out_far));
  if (mode == PartyMode::PastPostSelect || mode == PartyMode::Deterministic)
    net.add(identity_channel(s.d_out * s.d_out, n.outside_out, n.msg_in));
  if (mode == PartyMode::FuturePostSelect || mode == PartyMode::Deterministic)
    net.add(identity_channel(s.d_in * s.d_in, n.msg_out, n.outside_in));
  return net;
}

PartyGadget party_gadget(const Party& party, PartyMode mode, const ChoiOperator& element) {
  if (element.in_dim() != party.in_dim() || element.out_dim() != party.out_dim())
    mismatch(party, "instrument element dimensions do not match the party");
  if (!teleports(mode)) return {{FactorNetwork({element.op()})}};

  const auto s = slot_of(party);
  const auto n = wire_names(party);
  FactorNetwork net;
  switch (mode) {
    case PartyMode::FullPostSelect:
      net.add(bsm_postselect0(s.d_in, s.in, n.probe_in).op());
      net.add(moved(element, s, n.probe_in_far, n.lab_out));
      net.add(bsm_postselect0(s.d_out, n.lab_out, n.probe_out_far).op());
      net.add(identity_channel(s.d_out, n.probe_out, s.out));
      return {{std::move(net)}};
    case PartyMode::PastPostSelect:
      // inside: post-selected input teleport, corrected output teleport
      net.add(bsm_postselect0(s.d_in, s.in, n.probe_in).op());
      net.add(cu_instrument(s.d_out, n.msg_in, n.probe_out, s.out).op());
      net.add(moved(element, s, n.probe_in_far, n.lab_out));
      net.add(bsm_instrument(s.d_out, n.lab_out, n.probe_out_far, n.outside_out).sum().op());
      return {{std::move(net)}};
    case PartyMode::FuturePostSelect:
      net.add(bsm_instrument(s.d_in, s.in, n.probe_in, n.msg_out).sum().op());
      net.add(identity_channel(s.d_out, n.probe_out, s.out));
      net.add(cu_instrument(s.d_in, n.outside_in, n.probe_in_far, n.lab_in).op());
      net.add(moved(element, s, n.lab_in, n.lab_out));
      net.add(bsm_postselect0(s.d_out, n.lab_out, n.probe_out_far).op());
      return {{std::move(net)}};
    case PartyMode::Deterministic: {
      PartyGadget g;
      const auto m = moved(element, s, n.lab_in, n.lab_out);
      for (std::size_t a = 0; a < s.d_in * s.d_in; ++a)
        for (std::size_t b = 0; b < s.d_out * s.d_out; ++b) {
          FactorNetwork branch;
          branch.add(bsm_element(s.d_in, a, s.in, n.probe_in, n.msg_out).op());
          branch.add(cu_element(s.d_out, b, n.msg_in, n.probe_out, s.out).op());
          branch.add(cu_element(s.d_in, a, n.outside_in, n.probe_in_far, n.lab_in).op());
          branch.add(m);
          branch.add(bsm_element(s.d_out, b, n.lab_out, n.probe_out_far, n.outside_out).op());
          g.branches.push_back(std::move(branch));
        }
      return g;
    }
    case PartyMode::Direct:
      break;
  }
  return {{FactorNetwork({element.op()})}};
}

FactorNetwork build_w_ext(const ProcessMatrix& w, const ProtocolSpec& spec) {
  spec.check();
  check_layout_matches(w, spec.layout);
  FactorNetwork net({w.op()});
  for (std::size_t k = 0; k < spec.layout.size(); ++k)
    net.append(party_resources(spec.layout[k], spec.modes[k]));
  return net;
}

double party_factor(const Party& party, PartyMode mode) {
  const double din2 = double(party.in_dim()) * double(party.in_dim());
  const double dout2 = double(party.out_dim()) * double(party.out_dim());
  switch (mode) {
    case PartyMode::FullPostSelect:
      return 1.0 / (din2 * dout2);
    case PartyMode::PastPostSelect:
      return 1.0 / din2;
    case PartyMode::FuturePostSelect:
      return 1.0 / dout2;
    case PartyMode::Direct:
    case PartyMode::Deterministic:
      break;
  }
  return 1.0;
}

double success_probability(const ProtocolSpec& spec) {
  double f = 1.0;
  for (std::size_t k = 0; k < spec.layout.size() && k < spec.modes.size(); ++k)
    f *= party_factor(spec.layout[k], spec.modes[k]);
  return f;
}

std::string tuple_key(const std::vector<std::size_t>& tuple) {
  std::string key;
  for (std::size_t k = 0; k < tuple.size(); ++k) {
    if (k) key += ',';
    key += std::to_string(tuple[k]);
  }
  return key;
}

nlohmann::json ProtocolReport::to_json() const {
  auto table = [&](const std::vector<double>& values) {
    auto obj = nlohmann::json::object();
    for (std::size_t i = 0; i < tuples.size(); ++i) obj[tuple_key(tuples[i])] = values[i];
    return obj;
  };
  return {{"raw", table(raw)},
          {"direct", table(direct)},
          {"normalized", table(normalized)},
          {"factor_analytic", factor_analytic},
          {"factor_empirical", factor_empirical},
          {"max_abs_error", max_abs_error},
          {"tol", tol},
          {"ok", ok()},
          {"branches_per_tuple", branches},
          {"plan", plan.to_json()},
          {"advisories", advisories}};
}

ProtocolReport run_protocol(const ProcessMatrix& w, const ProtocolSpec& spec,
                            const RunOptions& options) {
  const auto ext = build_w_ext(w, spec);
  const std::size_t n = spec.layout.size();

  // gadgets[k][o]: party k, outcome o
  std::vector<std::vector<PartyGadget>> gadgets(n);
  std::vector<std::size_t> sizes(n);
  for (std::size_t k = 0; k < n; ++k) {
    sizes[k] = spec.instruments[k].size();
    for (const auto& e : spec.instruments[k].outcomes())
      gadgets[k].push_back(party_gadget(spec.layout[k], spec.modes[k], e));
  }

  ProtocolReport r;
  r.tol = options.tol;
  r.factor_analytic = success_probability(spec);
  r.tuples = outcome_tuples(sizes);
  if (std::find(spec.modes.begin(), spec.modes.end(), PartyMode::Deterministic) !=
      spec.modes.end())
    r.advisories.push_back(
        "deterministic mode needs two-way classical communication between each slot and "
        "its agent; causal compatibility of the labs with W is not checked");

  auto network = [&](const std::vector<std::size_t>& tuple,
                     const std::vector<std::size_t>& branch) {
    FactorNetwork net = ext;
    for (std::size_t k = 0; k < n; ++k) net.append(gadgets[k][tuple[k]].branches[branch[k]]);
    return net;
  };

  std::vector<std::size_t> branch_sizes(n);
  for (std::size_t k = 0; k < n; ++k) {
    branch_sizes[k] = gadgets[k][0].branches.size();
    r.branches *= branch_sizes[k];
  }
  const auto combos = outcome_tuples(branch_sizes);

  // Every tuple and branch gives the same network shape, so one plan serves.
  const auto first = network(r.tuples.front(), combos.front());
  first.validate();
  r.plan = plan_contraction(first);
  enforce_peak_cap(r.plan, options.max_dim);

  // Each party's resources and gadget factors only touch its own wires and
  // its slot in W. Contract that cluster once per (outcome, branch); every
  // network is then W plus one piece per party, the same sum in another order.
  std::vector<std::vector<std::vector<LabeledOperator>>> pieces(n);
  ContractionPlan reduced_plan;
  {
    for (std::size_t k = 0; k < n; ++k) {
      const auto resources = party_resources(spec.layout[k], spec.modes[k]);
      for (const auto& g : gadgets[k]) {
        auto& row = pieces[k].emplace_back();
        for (const auto& b : g.branches) {
          FactorNetwork cluster = resources;
          cluster.append(b);
          const auto plan = plan_contraction(cluster);
          enforce_peak_cap(plan, options.max_dim);
          row.push_back(contract(cluster, plan));
        }
      }
    }
    FactorNetwork reduced({w.op()});
    for (std::size_t k = 0; k < n; ++k) reduced.add(pieces[k][0][0]);
    reduced_plan = plan_contraction(reduced);
    enforce_peak_cap(reduced_plan, options.max_dim);
  }
  auto branch_value = [&](const std::vector<std::size_t>& t, const std::vector<std::size_t>& c) {
    FactorNetwork net({w.op()});
    for (std::size_t k = 0; k < n; ++k) net.add(pieces[k][t[k]][c[k]]);
    return contract(net, reduced_plan).value().real();
  };

  double sum_raw = 0.0, sum_direct = 0.0;
  std::vector<ChoiOperator> elements(n);
  for (const auto& t : r.tuples) {
    for (std::size_t k = 0; k < n; ++k) elements[k] = spec.instruments[k][t[k]];
    double raw = 0.0;
    for (const auto& c : combos) raw += branch_value(t, c);
    const double direct = probability(w, elements);
    const double normalized = raw / r.factor_analytic;
    r.raw.push_back(raw);
    r.direct.push_back(direct);
    r.normalized.push_back(normalized);
    r.max_abs_error = std::max(r.max_abs_error, std::abs(normalized - direct));
    sum_raw += raw;
    sum_direct += direct;
  }
  r.factor_empirical = sum_direct != 0.0 ? sum_raw / sum_direct : 0.0;
  return r;
}

FactorNetwork protocol_network(const ProcessMatrix& w, const ProtocolSpec& spec,
                               std::span<const std::size_t> outcomes,
                               std::span<const std::size_t> branches) {
  auto net = build_w_ext(w, spec);
  const auto n = spec.layout.size();
  if (outcomes.size() != n || branches.size() != n)
    throw SpecMismatch("need one outcome and one branch index per party");
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = spec.layout[k];
    if (outcomes[k] >= spec.instruments[k].size())
      mismatch(p, "outcome " + std::to_string(outcomes[k]) + " out of range");
    auto g = party_gadget(p, spec.modes[k], spec.instruments[k][outcomes[k]]);
    if (branches[k] >= g.branches.size())
      mismatch(p, "branch " + std::to_string(branches[k]) + " out of range");
    net.append(g.branches[branches[k]]);
  }
  return net;
}

ProcessMatrix build_v(const ProcessMatrix& w, std::span<const PartyMode> modes,
                      std::size_t max_dim) {
  const auto& layout = w.layout();
  if (modes.size() != layout.size()) throw SpecMismatch("need one mode per party");
  check_fresh(layout, std::vector<PartyMode>(modes.begin(), modes.end()));

  std::vector<Party> parties;
  std::vector<LabeledOperator> channels;
  std::size_t side = w.op().dim();
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const auto& p = layout[k];
    if (modes[k] == PartyMode::Direct) {
      parties.push_back(p);
      continue;
    }
    if (modes[k] != PartyMode::PastPostSelect && modes[k] != PartyMode::FuturePostSelect)
      mismatch(p, "V is defined for past/future post-selected and direct parties only");
    const auto s = slot_of(p);
    const auto n = wire_names(p);
    if (modes[k] == PartyMode::PastPostSelect) {
      const SpaceLabel msg_in{n.msg_in, s.d_out * s.d_out};
      const SpaceLabel outside{n.outside_out, msg_in.dim};
      parties.push_back(Party{p.name, {p.inputs[0], msg_in}, p.outputs});
      parties.push_back(Party{p.name + "~", {}, {outside}});
      channels.push_back(identity_channel(msg_in.dim, outside.name, msg_in.name));
    } else {
      const SpaceLabel msg_out{n.msg_out, s.d_in * s.d_in};
      const SpaceLabel outside{n.outside_in, msg_out.dim};
      parties.push_back(Party{p.name, p.inputs, {p.outputs[0], msg_out}});
      parties.push_back(Party{p.name + "~", {outside}, {}});
      channels.push_back(identity_channel(msg_out.dim, msg_out.name, outside.name));
    }
    side *= channels.back().dim();
  }
  if (side > max_dim) {
    ContractionPlan plan;
    plan.peak_dim = side;
    throw ContractTooLarge("V has side " + std::to_string(side) + ", above the cap " +
                               std::to_string(max_dim),
                           plan.to_json().dump());
  }
  auto v = w.op();
  for (const auto& c : channels) v = tensor_product(v, c);
  return {std::move(v), PartyLayout(std::move(parties))};
}

}  // namespace cts
