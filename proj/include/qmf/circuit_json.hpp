#pragma once

// Circuit interchange:
//   {"registers":[{"name","size","role"}],
//    "gates":[{"kind","targets":[...],"controls":[...],"angle":...}],
//    "ancilla_high_water":..., "meta":{...}}
// plus a flat one-gate-per-line text listing for external simulators.

#include <optional>
#include <sstream>
#include <string>

#include "json.hpp"
#include "qmf/circuit.hpp"

namespace qmf {

inline nlohmann::json gate_to_json(const Gate& g) {
  nlohmann::json j;
  j["kind"] = gate_kind_name(g.kind);
  switch (g.kind) {
    case GateKind::CNOT:
      j["targets"] = {g.q0};
      j["controls"] = {g.q1};
      break;
    case GateKind::Toffoli:
      j["targets"] = {g.q0};
      j["controls"] = {g.q1, g.q2};
      break;
    case GateKind::CRphi:
      j["targets"] = {g.q0};
      j["controls"] = {g.q1};
      j["angle"] = g.angle;
      break;
    case GateKind::CCRphi:
      j["targets"] = {g.q0};
      j["controls"] = {g.q1, g.q2};
      j["angle"] = g.angle;
      break;
    case GateKind::Rphi:
      j["targets"] = {g.q0};
      j["angle"] = g.angle;
      break;
    case GateKind::Measure:
      j["targets"] = {g.q0};
      j["classical_bit"] = g.classical_bit;
      break;
    default:
      j["targets"] = {g.q0};
      break;
  }
  if (g.cond_bit >= 0) j["condition_bit"] = g.cond_bit;
  return j;
}

inline Gate gate_from_json(const nlohmann::json& j) {
  Gate g;
  std::string kind = j.at("kind").get<std::string>();
  auto targets = j.at("targets");
  g.q0 = targets.at(0).get<int>();
  std::vector<int> controls;
  if (j.contains("controls"))
    for (const auto& c : j.at("controls")) controls.push_back(c.get<int>());
  if (kind == "h") g.kind = GateKind::H;
  else if (kind == "x") g.kind = GateKind::X;
  else if (kind == "cnot") g.kind = GateKind::CNOT;
  else if (kind == "toffoli") g.kind = GateKind::Toffoli;
  else if (kind == "crphi") g.kind = GateKind::CRphi;
  else if (kind == "ccrphi") g.kind = GateKind::CCRphi;
  else if (kind == "rphi") g.kind = GateKind::Rphi;
  else if (kind == "measure") g.kind = GateKind::Measure;
  else throw std::invalid_argument("unknown gate kind: " + kind);
  if (!controls.empty()) g.q1 = controls[0];
  if (controls.size() > 1) g.q2 = controls[1];
  if (j.contains("angle")) g.angle = j.at("angle").get<double>();
  if (j.contains("classical_bit")) g.classical_bit = j.at("classical_bit").get<int>();
  if (j.contains("condition_bit")) g.cond_bit = j.at("condition_bit").get<int>();
  return g;
}

inline nlohmann::json circuit_to_json(const Circuit& c,
                                      nlohmann::json meta = nlohmann::json::object()) {
  nlohmann::json j;
  j["registers"] = nlohmann::json::array();
  for (const auto& r : c.registers())
    j["registers"].push_back({{"name", r.name}, {"size", r.size}, {"role", r.role}});
  j["gates"] = nlohmann::json::array();
  for (const auto& g : c.gates()) j["gates"].push_back(gate_to_json(g));
  j["ancilla_high_water"] = c.ancilla_high_water();
  if (!meta.empty()) j["meta"] = meta;
  return j;
}

inline Circuit circuit_from_json(const nlohmann::json& j, nlohmann::json* meta = nullptr) {
  Circuit c;
  for (const auto& r : j.at("registers"))
    c.add_register(r.at("name").get<std::string>(), r.at("size").get<int>(),
                   r.value("role", "input"));
  for (const auto& g : j.at("gates")) c.on_gate(gate_from_json(g));
  if (meta && j.contains("meta")) *meta = j.at("meta");
  return c;
}

// One gate per line: KIND target [controls...] [@angle]
inline std::string circuit_to_text(const Circuit& c) {
  std::ostringstream os;
  for (const auto& r : c.registers())
    os << "# register " << r.name << " size " << r.size << " role " << r.role << "\n";
  for (const auto& g : c.gates()) {
    os << gate_kind_name(g.kind) << " " << g.q0;
    if (g.q1 >= 0) os << " " << g.q1;
    if (g.q2 >= 0) os << " " << g.q2;
    if (g.kind == GateKind::CRphi || g.kind == GateKind::CCRphi || g.kind == GateKind::Rphi)
      os << " @" << g.angle;
    os << "\n";
  }
  return os.str();
}

}  // namespace qmf
