#pragma once

// Symbolic verifier for the bundled parallel in-place addition sequences.
// Sequences are data: JSON files listing scaled additions, sign flips and
// exact divisions over k registers, with product markers naming which
// registers hold evaluation rows at that moment. Verification checks that
// every marked register is proportional (by +/- a power of two) to the
// evaluation row of one of the declared points, that every point is
// covered exactly once, that divisions are exact, and that the final
// state restores the initial registers.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qmf/linexpr.hpp"
#include "qmf/toom.hpp"

namespace qmf {

struct SeqOp {
  enum class Kind { AddScaled, Negate, Divide };
  Kind kind = Kind::AddScaled;
  std::size_t src = 0, dst = 0;
  std::int64_t src_coeff = 1, dst_coeff = 1;
  std::int64_t divisor = 1;
};

struct ProductMarker {
  std::size_t after_op = 0;
  std::vector<std::size_t> registers;
};

struct Sequence {
  std::string name;
  std::size_t registers = 0;
  std::vector<SeqOp> ops;
  std::vector<ProductMarker> products;
  std::vector<EvalPoint> points;
};

inline EvalPoint parse_point(const std::string& s) {
  if (s == "inf") return EvalPoint::infinity();
  auto slash = s.find('/');
  if (slash == std::string::npos) return EvalPoint::finite(std::stoll(s));
  std::int64_t num = std::stoll(s.substr(0, slash));
  std::int64_t den = std::stoll(s.substr(slash + 1));
  if (num != 1 && num != -1) throw std::invalid_argument("parse_point: not a unit fraction");
  return EvalPoint::unit_fraction(num < 0 ? -den : den);
}

inline Sequence parse_sequence(const nlohmann::json& j) {
  Sequence s;
  s.name = j.value("name", "");
  s.registers = j.at("registers").get<std::size_t>();
  for (const auto& jo : j.at("ops")) {
    SeqOp op;
    std::string kind = jo.at("kind").get<std::string>();
    if (kind == "add_scaled") {
      op.kind = SeqOp::Kind::AddScaled;
      op.src = jo.at("src").get<std::size_t>();
      op.dst = jo.at("dst").get<std::size_t>();
      op.src_coeff = jo.at("src_coeff").get<std::int64_t>();
      op.dst_coeff = jo.at("dst_coeff").get<std::int64_t>();
      if (op.src_coeff == 0 || op.dst_coeff == 0)
        throw std::invalid_argument("sequence: zero coefficient");
    } else if (kind == "negate") {
      op.kind = SeqOp::Kind::Negate;
      op.dst = jo.at("reg").get<std::size_t>();
    } else if (kind == "divide") {
      op.kind = SeqOp::Kind::Divide;
      op.dst = jo.at("reg").get<std::size_t>();
      op.divisor = jo.at("divisor").get<std::int64_t>();
      if (op.divisor <= 0 || (op.divisor & (op.divisor - 1)))
        throw std::invalid_argument("sequence: divisor must be a power of two");
    } else {
      throw std::invalid_argument("sequence: unknown op kind " + kind);
    }
    if (op.dst >= s.registers || op.src >= s.registers)
      throw std::invalid_argument("sequence: register out of range");
    s.ops.push_back(op);
  }
  for (const auto& jp : j.at("products")) {
    ProductMarker m;
    m.after_op = jp.at("after_op").get<std::size_t>();
    for (const auto& r : jp.at("registers")) m.registers.push_back(r.get<std::size_t>());
    s.products.push_back(m);
  }
  for (const auto& jp : j.at("points")) s.points.push_back(parse_point(jp.get<std::string>()));
  return s;
}

inline Sequence parse_sequence_text(const std::string& text) {
  return parse_sequence(nlohmann::json::parse(text));
}

struct SequenceTrace {
  std::vector<std::vector<LinExpr>> states;  // state after each op
  bool divisions_exact = true;
  std::string diagnostic;
};

// Exact symbolic execution over the register symbols; divide steps are
// checked for coefficient divisibility.
inline SequenceTrace symbolic_execute(const Sequence& seq) {
  SequenceTrace out;
  std::size_t k = seq.registers;
  std::vector<LinExpr> state;
  for (std::size_t i = 0; i < k; ++i) state.push_back(LinExpr::symbol(k, i));
  for (std::size_t idx = 0; idx < seq.ops.size(); ++idx) {
    const SeqOp& op = seq.ops[idx];
    switch (op.kind) {
      case SeqOp::Kind::AddScaled: {
        LinExpr dst = state[op.dst];
        dst.scale(Rational(op.dst_coeff));
        dst.add_scaled(state[op.src], Rational(op.src_coeff));
        state[op.dst] = dst;
        break;
      }
      case SeqOp::Kind::Negate:
        state[op.dst].negate();
        break;
      case SeqOp::Kind::Divide: {
        LinExpr& e = state[op.dst];
        e.scale(Rational(1, op.divisor));
        if (!e.all_integer()) {
          out.divisions_exact = false;
          out.diagnostic = "inexact division at op " + std::to_string(idx) + ": " +
                           e.to_string();
        }
        break;
      }
    }
    out.states.push_back(state);
  }
  return out;
}

struct SequenceVerdict {
  bool pass = false;
  std::string diagnostic;
};

// Passes when every marked register holds a combination proportional (by
// +/- a power of two) to the evaluation row of one declared point, every
// point is matched exactly once, divisions are exact, and the final state
// equals the initial one.
inline SequenceVerdict verify_sequence(const Sequence& seq,
                                       const std::vector<EvalPoint>& points) {
  SequenceVerdict v;
  std::size_t k = seq.registers;
  auto rows = eval_matrix(points, k);
  auto trace = symbolic_execute(seq);
  if (!trace.divisions_exact) {
    v.diagnostic = trace.diagnostic;
    return v;
  }
  std::vector<bool> covered(points.size(), false);
  for (const auto& marker : seq.products) {
    if (marker.after_op < 1 || marker.after_op > trace.states.size()) {
      v.diagnostic = "marker after_op out of range";
      return v;
    }
    const auto& state = trace.states[marker.after_op - 1];
    for (std::size_t r : marker.registers) {
      bool matched = false;
      for (std::size_t l = 0; l < points.size() && !matched; ++l) {
        if (covered[l]) continue;
        LinExpr row(k);
        for (std::size_t j = 0; j < k; ++j) row.coeff(j) = Rational(rows[l][k - 1 - j]);
        Rational lambda;
        if (state[r].proportional_to(row, lambda) && is_pm_power_of_two(lambda)) {
          covered[l] = true;
          matched = true;
        }
      }
      if (!matched) {
        v.diagnostic = "register " + std::to_string(r) + " at op " +
                       std::to_string(marker.after_op) + " holds " + state[r].to_string() +
                       ", which matches no unclaimed point";
        return v;
      }
    }
  }
  for (std::size_t l = 0; l < points.size(); ++l)
    if (!covered[l]) {
      v.diagnostic = "point " + points[l].to_string() + " never produced";
      return v;
    }
  if (!trace.states.empty()) {
    const auto& fin = trace.states.back();
    for (std::size_t i = 0; i < k; ++i) {
      if (fin[i] != LinExpr::symbol(k, i)) {
        v.diagnostic = "register " + std::to_string(i) + " not restored: " + fin[i].to_string();
        return v;
      }
    }
  }
  v.pass = true;
  return v;
}

inline Sequence load_sequence_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open sequence asset: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_sequence_text(ss.str());
}

// The three bundled sequences, loaded from the asset directory.
inline std::vector<Sequence> load_sequences(const std::string& dir) {
  std::vector<Sequence> out;
  for (const char* name : {"k3_cq", "k3_qq", "k4_qq"})
    out.push_back(load_sequence_file(dir + "/" + std::string(name) + ".json"));
  return out;
}

}  // namespace qmf
