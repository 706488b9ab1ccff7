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

#include <cstddef>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cts/channels.hpp"
#include "cts/link.hpp"
#include "cts/process.hpp"

namespace cts {

enum class PartyMode { Direct, Deterministic, FullPostSelect, PastPostSelect, FuturePostSelect };

/// Scenario spellings: direct, deterministic, full_ps, past_ps, future_ps.
std::string_view to_string(PartyMode mode);
/// Throws ParseError for an unknown spelling.
PartyMode parse_party_mode(std::string_view text);

inline bool teleports(PartyMode mode) { return mode != PartyMode::Direct; }

struct ProtocolSpec {
  PartyLayout layout;
  std::vector<PartyMode> modes;
  /// Over the party's own input and output spaces.
  std::vector<Instrument> instruments;

  /// Throws SpecMismatch naming the offending party.
  void check() const;
};

/// Generated wire names of one party. The "outside" lab is where the agent
/// really sits; the "inside" lab is the slot in W.
struct WireNames {
  std::string probe_in, probe_in_far;    // probe pair for the input
  std::string probe_out, probe_out_far;  // probe pair for the output
  std::string lab_in, lab_out;           // agent's own input/output, outside
  std::string msg_in;                    // I^M: message into the slot
  std::string msg_out;                   // O^M: message out of the slot
  std::string outside_out;               // O~: message leaving the agent
  std::string outside_in;                // I~: message reaching the agent
};

WireNames wire_names(const Party& party);

/// Probe pairs and message channels adjoined to W for this party.
FactorNetwork party_resources(const Party& party, PartyMode mode);

/// The branches of a party's gadget for one instrument element. Only the
/// deterministic mode has more than one branch; its probabilities add.
struct PartyGadget {
  std::vector<FactorNetwork> branches;
};

/// `element` is over the party's own spaces.
PartyGadget party_gadget(const Party& party, PartyMode mode, const ChoiOperator& element);

/// W together with every party's resources. The first factor is w.op().
FactorNetwork build_w_ext(const ProcessMatrix& w, const ProtocolSpec& spec);

/// Post-selection success probability of one party: 1/(d_in^2 d_out^2),
/// 1/d_in^2, 1/d_out^2 or 1.
double party_factor(const Party& party, PartyMode mode);
double success_probability(const ProtocolSpec& spec);

struct RunOptions {
  std::size_t max_dim = 4096;
  double tol = 1e-9;
};

struct ProtocolReport {
  std::vector<std::vector<std::size_t>> tuples;
  std::vector<double> raw;         // contracted, with the teleportation gadgets
  std::vector<double> direct;      // Tr[W^T (x) M]
  std::vector<double> normalized;  // raw / factor_analytic
  double factor_analytic = 1.0;
  double factor_empirical = 1.0;   // sum(raw) / sum(direct)
  double max_abs_error = 0.0;      // max |normalized - direct|
  double tol = 0.0;
  std::size_t branches = 1;        // contracted networks per tuple
  // Greedy plan of one full network. Evaluation contracts each party's
  // cluster once per outcome and branch, then links the pieces with W.
  ContractionPlan plan;
  std::vector<std::string> advisories;

  bool ok() const { return max_abs_error <= tol; }
  nlohmann::json to_json() const;
};

/// Contracts W_ext with every party's gadget, outcome tuple by outcome tuple,
/// and compares against the direct probabilities. Throws SpecMismatch and
/// ContractTooLarge.
ProtocolReport run_protocol(const ProcessMatrix& w, const ProtocolSpec& spec,
                            const RunOptions& options = {});

/// The network contracted by run_protocol for one outcome tuple and one
/// choice of deterministic branch per party (index 0 elsewhere).
FactorNetwork protocol_network(const ProcessMatrix& w, const ProtocolSpec& spec,
                               std::span<const std::size_t> outcomes,
                               std::span<const std::size_t> branches);

/// W with message identity channels for the past/future post-selected
/// parties, as a dense process over the extended layout (no probes). Direct
/// parties keep their slot; other modes throw SpecMismatch. Throws
/// ContractTooLarge when the side of V exceeds `max_dim`.
ProcessMatrix build_v(const ProcessMatrix& w, std::span<const PartyMode> modes,
                      std::size_t max_dim = 4096);

/// Outcome tuple key used in reports, e.g. "0,2".
std::string tuple_key(const std::vector<std::size_t>& tuple);

}  // namespace cts
