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


#include "cts_app/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "cts/errors.hpp"

namespace cts::app {

namespace {

constexpr std::uint64_t kStateStream = 1000;
constexpr std::uint64_t kChannelStream = 1001;
constexpr std::uint64_t kInstrumentStream = 2000;

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

const nlohmann::json& field(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw ParseError(where + ": missing field '" + key + "'");
  return obj.at(key);
}

std::size_t positive(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 1)
    throw ParseError(where + ": expected a positive integer");
  return v.get<std::size_t>();
}

std::size_t positive_or(const nlohmann::json& obj, const char* key, std::size_t fallback,
                        const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return positive(obj.at(key), where + "." + key);
}

Matrix square(const nlohmann::json& v, std::size_t d, const std::string& where) {
  Matrix m = matrix_from_json(v);
  if (m.rows() != static_cast<Eigen::Index>(d) || m.cols() != m.rows())
    throw ParseError(where + ": expected a " + std::to_string(d) + "x" + std::to_string(d) +
                     " matrix");
  return m;
}

// "random", a matrix, or absent (|0><0|).
Matrix density(const nlohmann::json& obj, const char* key, std::size_t d, std::uint64_t seed,
               const std::string& where) {
  if (!obj.contains(key)) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    m(0, 0) = 1.0;
    return m;
  }
  const auto& v = obj.at(key);
  if (v.is_string() && v.get<std::string>() == "random")
    return random_state(d, derive_seed(seed, kStateStream)).data();
  return square(v, d, where + "." + key);
}

std::vector<Matrix> kraus_list(const nlohmann::json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ParseError(where + ": expected a list of matrices");
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    try {
      out.push_back(matrix_from_json(v[i]));
    } catch (const ParseError& e) {
      throw ParseError(where + "[" + std::to_string(i) + "]: " + e.what());
    }
  }
  return out;
}

Labels spaces(const nlohmann::json& v, const std::string& where) {
  if (!v.is_array()) throw ParseError(where + ": expected a list of spaces");
  Labels out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto w = where + "[" + std::to_string(i) + "]";
    const auto& name = field(v[i], "name", w);
    if (!name.is_string()) throw ParseError(w + ".name: expected a string");
    out.push_back({name.get<std::string>(), positive(field(v[i], "dim", w), w + ".dim")});
  }
  return out;
}

ProcessMatrix explicit_process(const nlohmann::json& spec) {
  auto op = operator_from_json(spec.at("matrix"));
  const auto& layout = field(spec, "layout", "process");
  if (!layout.is_array()) throw ParseError("process.layout: expected a list of parties");
  std::vector<Party> parties;
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const auto w = "process.layout[" + std::to_string(k) + "]";
    const auto& name = field(layout[k], "name", w);
    if (!name.is_string()) throw ParseError(w + ".name: expected a string");
    Party p{name.get<std::string>(), {}, {}};
    if (layout[k].contains("inputs")) p.inputs = spaces(layout[k]["inputs"], w + ".inputs");
    if (layout[k].contains("outputs")) p.outputs = spaces(layout[k]["outputs"], w + ".outputs");
    parties.push_back(std::move(p));
  }
  return {std::move(op), PartyLayout(std::move(parties))};
}

Instrument party_instrument(const nlohmann::json& spec, const Party& party, std::size_t index,
                            std::uint64_t seed, double tol) {
  const auto where = "party '" + party.name + "'";
  if (spec.contains("random")) {
    const auto n = positive(field(spec["random"], "outcomes", where + ".instrument.random"),
                            where + ".instrument.random.outcomes");
    auto inst = random_instrument(party.in_dim(), party.out_dim(), n,
                                  derive_seed(seed, kInstrumentStream + index));
    std::vector<ChoiOperator> out;
    for (const auto& e : inst.outcomes()) out.push_back(e.reshaped(party.inputs, party.outputs));
    return Instrument(std::move(out));
  }
  const auto& sets = field(spec, "kraus_sets", where + ".instrument");
  if (!sets.is_array() || sets.empty())
    throw ParseError(where + ".instrument.kraus_sets: expected a non-empty list");
  std::vector<ChoiOperator> out;
  for (std::size_t o = 0; o < sets.size(); ++o) {
    auto kraus = kraus_list(sets[o], where + ".instrument.kraus_sets[" + std::to_string(o) + "]");
    for (const auto& k : kraus)
      if (k.rows() != static_cast<Eigen::Index>(party.out_dim()) ||
          k.cols() != static_cast<Eigen::Index>(party.in_dim()))
        throw SpecMismatch(where + ": Kraus operator of outcome " + std::to_string(o) + " is " +
                           std::to_string(k.rows()) + "x" + std::to_string(k.cols()) +
                           ", expected d_out x d_in = " + std::to_string(party.out_dim()) +
                           "x" + std::to_string(party.in_dim()));
    out.push_back(choi_from_kraus(kraus, party.inputs, party.outputs));
  }
  Instrument inst(std::move(out));
  const auto check = check_instrument(inst, std::max(tol, 1e-9));
  if (!check.valid())
    throw SpecMismatch(where + ": Kraus sets do not form an instrument (trace deviation " +
                       std::to_string(check.sum.trace_deviation) + ")");
  return inst;
}

ProtocolSpec protocol_spec(const nlohmann::json& parties, const ProcessMatrix& w,
                           std::uint64_t seed, double tol) {
  if (!parties.is_array()) throw ParseError("parties: expected a list");
  const auto& layout = w.layout();
  std::map<std::string, const nlohmann::json*> by_name;
  for (std::size_t i = 0; i < parties.size(); ++i) {
    const auto w_i = "parties[" + std::to_string(i) + "]";
    const auto& name = field(parties[i], "name", w_i);
    if (!name.is_string()) throw ParseError(w_i + ".name: expected a string");
    const auto n = name.get<std::string>();
    if (!layout.index_of(n)) throw SpecMismatch("party '" + n + "' is not part of the process");
    if (!by_name.emplace(n, &parties[i]).second)
      throw SpecMismatch("party '" + n + "' is listed twice");
  }

  ProtocolSpec spec;
  spec.layout = layout;
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const auto& p = layout[k];
    auto it = by_name.find(p.name);
    if (it == by_name.end()) throw SpecMismatch("party '" + p.name + "' is missing from parties");
    const auto& j = *it->second;
    const auto where = "party '" + p.name + "'";
    for (auto [key, expected] : {std::pair{"d_in", p.in_dim()}, std::pair{"d_out", p.out_dim()}}) {
      if (!j.contains(key)) continue;
      const auto got = positive(j[key], where + "." + key);
      if (got != expected)
        throw SpecMismatch(where + ": " + key + " = " + std::to_string(got) +
                           " but the process has " + std::to_string(expected));
    }
    const auto& mode = field(j, "mode", where);
    if (!mode.is_string()) throw ParseError(where + ".mode: expected a string");
    spec.modes.push_back(parse_party_mode(mode.get<std::string>()));
    spec.instruments.push_back(
        party_instrument(field(j, "instrument", where), p, k, seed, tol));
  }
  spec.check();
  return spec;
}

}  // namespace

nlohmann::json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream msg;
    msg << source << ":" << line << ":" << column << ": malformed JSON (" << e.what() << ")";
    throw JsonSyntaxError(msg.str(), line, column);
  }
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

std::string process_kind(const nlohmann::json& spec) {
  if (!spec.is_object()) throw ParseError("process: expected an object");
  if (spec.contains("matrix")) return "matrix";
  const auto& b = field(spec, "builtin", "process");
  if (!b.is_string()) throw ParseError("process.builtin: expected a string");
  return b.get<std::string>();
}

ProcessMatrix build_process(const nlohmann::json& spec, std::uint64_t seed) {
  const auto kind = process_kind(spec);
  if (kind == "matrix") return explicit_process(spec);
  if (kind == "state") {
    const auto d = positive_or(spec, "dim", 2, "process");
    std::optional<std::size_t> d_out;
    if (spec.contains("d_out")) d_out = positive(spec["d_out"], "process.d_out");
    return build_state_process(density(spec, "state", d, seed, "process"), d_out);
  }
  if (kind == "comb") {
    const auto d = positive_or(spec, "dim", 2, "process");
    CombOptions options;
    if (spec.contains("measurement_only")) {
      if (!spec["measurement_only"].is_boolean())
        throw ParseError("process.measurement_only: expected true or false");
      options.measurement_only = spec["measurement_only"].get<bool>();
    }
    const SpaceLabel in{"A.O", d}, out{"B.I", d};
    ChoiOperator channel;
    const auto c = spec.value("channel", nlohmann::json("identity"));
    if (c.is_string() && c.get<std::string>() == "identity") {
      const Matrix id[] = {Matrix::Identity(static_cast<Eigen::Index>(d),
                                            static_cast<Eigen::Index>(d))};
      channel = choi_from_kraus(id, in, out);
    } else if (c.is_string() && c.get<std::string>() == "random") {
      channel = random_cptp(d, d, derive_seed(seed, kChannelStream), "A.O", "B.I");
    } else {
      const auto kraus = kraus_list(field(c, "kraus", "process.channel"), "process.channel.kraus");
      channel = choi_from_kraus(kraus, in, out);
    }
    return build_channel_comb(channel, density(spec, "state", d, seed, "process"), options);
  }
  if (kind == "switch") {
    const auto d = positive_or(spec, "target_dim", 2, "process");
    Matrix control = Matrix::Constant(2, 2, 0.5);
    if (spec.contains("control")) control = square(spec["control"], 2, "process.control");
    std::optional<Matrix> target;
    if (spec.contains("target")) target = density(spec, "target", d, seed, "process");
    return build_quantum_switch(d, control, target);
  }
  throw ParseError("process.builtin: unknown builtin '" + kind +
                   "' (expected state, comb or switch)");
}

Scenario load_scenario(const nlohmann::json& doc, const std::string& source,
                       std::optional<double> tol, std::optional<std::uint64_t> seed) {
  if (!doc.is_object()) throw ParseError(source + ": expected a JSON object");
  Scenario s;
  s.source = source;
  if (doc.contains("tol")) {
    if (!doc["tol"].is_number() || doc["tol"].get<double>() <= 0.0)
      throw ParseError(source + ": tol must be a positive number");
    s.tol = doc["tol"].get<double>();
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ParseError(source + ": seed must be an unsigned integer");
    s.seed = doc["seed"].get<std::uint64_t>();
  }
  if (tol) s.tol = *tol;
  if (seed) s.seed = *seed;

  const auto& spec = doc.contains("process") ? doc.at("process") : doc;
  s.kind = process_kind(spec);
  s.process = build_process(spec, s.seed);
  if (doc.contains("parties")) s.protocol = protocol_spec(doc.at("parties"), *s.process, s.seed, s.tol);
  return s;
}

}  // namespace cts::app
