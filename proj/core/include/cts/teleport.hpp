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
#include <string>
#include <vector>

#include "cts/channels.hpp"
#include "cts/labeled_operator.hpp"

namespace cts {

/// Outcome (n, m) of a generalized Bell measurement in dimension d, flattened
/// as n*d + m.
struct BellIndex {
  std::size_t n = 0;
  std::size_t m = 0;

  std::size_t flat(std::size_t d) const { return n * d + m; }
  static BellIndex from_flat(std::size_t flat, std::size_t d) { return {flat / d, flat % d}; }
};

/// |psi_nm> = d^{-1/2} sum_j e^{2 pi i j n / d} |j> (x) |j + m mod d>.
Vector bell_state(std::size_t d, std::size_t n, std::size_t m);

/// U_nm = sum_k e^{2 pi i k n / d} |k><k + m mod d|; U_nm undoes outcome (n, m).
Matrix correction_unitary(std::size_t d, std::size_t n, std::size_t m);
Matrix correction_unitary(std::size_t d, std::size_t flat);

/// Bell measurement on spaces a, b (dimension d each) writing the flat outcome
/// into `message` (dimension d^2) in the computational basis. Outcome m has
/// Kraus operator |m><psi_m|.
Instrument bsm_instrument(std::size_t d, const std::string& a, const std::string& b,
                          const std::string& message);
/// Single outcome of bsm_instrument.
ChoiOperator bsm_element(std::size_t d, std::size_t flat, const std::string& a,
                         const std::string& b, const std::string& message);
/// Post-selection on outcome (0, 0): the POVM element |Phi+><Phi+|, no output.
ChoiOperator bsm_postselect0(std::size_t d, const std::string& a, const std::string& b);

/// Reads the message and applies the matching correction to the probe:
/// Kraus operators U_m (x) <m| for every m, mapping (message, probe) -> out.
ChoiOperator cu_instrument(std::size_t d, const std::string& message,
                           const std::string& probe, const std::string& out);
/// The single Kraus branch U_m (x) <m| of cu_instrument.
ChoiOperator cu_element(std::size_t d, std::size_t flat, const std::string& message,
                        const std::string& probe, const std::string& out);

struct TeleportOutcome {
  BellIndex index;
  std::size_t flat = 0;
  double probability = 0.0;
  double fidelity = 0.0;              // after correction
  double uncorrected_fidelity = 0.0;  // before correction
};

struct TeleportReport {
  std::size_t dim = 0;
  std::vector<TeleportOutcome> outcomes;
  double max_probability_error = 0.0;  // max |p - 1/d^2|
  double min_fidelity = 1.0;

  nlohmann::json to_json() const;
};

/// Teleports |psi> through a |Phi+> pair with the message-emitting Bell
/// measurement and the controlled correction, outcome by outcome. Throws
/// BadState unless psi has unit norm (within 1e-9).
TeleportReport teleport_state_demo(std::size_t d, const Vector& psi);

}  // namespace cts
