#pragma once

// Top-level multiplication circuits, all built as QFT sandwiches around a
// PhaseProduct / PhaseTripleProduct:
//
//   u_cq(a):  |x>|w> -> |x>|w + a x mod 2^nw>      (a may be any rational)
//   u_qq:     |x>|y>|w> -> |x>|y>|w + a x y mod 2^nw>
//   u_cq_mod: phase 2 pi a x z / N inside the sandwich; the output register
//             concentrates on the binary fraction nearest a x / N.
//   inplace_mod_mul: |x>|0^m> ~-> |c x mod N>|0^m>, the in-place modular
//             multiplication built from the pieces above.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmf/circuit.hpp"
#include "qmf/phase_compiler.hpp"
#include "qmf/qft.hpp"

namespace qmf {

struct MultiplierConfig {
  CompileConfig compile;
  QftConfig qft;
};

// Rounds a real multiplier to a dyadic rational with frac_bits fractional
// bits before phase synthesis.
inline Rational dyadic_round(double a, std::size_t frac_bits) {
  double scaled = std::ldexp(a, static_cast<int>(frac_bits));
  if (std::abs(scaled) >= 9.0e18)
    throw std::invalid_argument("dyadic_round: multiplier too large for the requested precision");
  BigInt num(static_cast<std::int64_t>(std::llround(scaled)));
  return Rational(num, BigInt::pow2(frac_bits));
}

struct MultiplierCircuit {
  Circuit circuit;
  std::vector<int> x, y, w;
};

inline MultiplierCircuit u_cq(const Rational& a, std::size_t n_x, std::size_t n_w,
                              MultiplierConfig cfg = {}) {
  if (n_w < 1 || n_x < 1) throw std::invalid_argument("u_cq: register widths must be >= 1");
  MultiplierCircuit mc;
  mc.x = mc.circuit.add_register("x", static_cast<int>(n_x), "input").qubits();
  mc.w = mc.circuit.add_register("w", static_cast<int>(n_w), "output").qubits();
  PhaseCompiler pc(cfg.compile);
  QftBuilder qb(cfg.qft, pc);
  qb.emit_qft(mc.circuit, mc.w);
  PhaseAngle phi{2.0 * std::numbers::pi, a / Rational(BigInt::pow2(n_w))};
  pc.emit_phase_product(mc.circuit, mc.x, mc.w, phi);
  qb.emit_iqft(mc.circuit, mc.w);
  return mc;
}

inline MultiplierCircuit u_qq(std::size_t n_x, std::size_t n_y, std::size_t n_w,
                              MultiplierConfig cfg = {}, const Rational& scale = Rational(1)) {
  if (n_x < 1 || n_y < 1 || n_w < 1)
    throw std::invalid_argument("u_qq: register widths must be >= 1");
  MultiplierCircuit mc;
  mc.x = mc.circuit.add_register("x", static_cast<int>(n_x), "input").qubits();
  mc.y = mc.circuit.add_register("y", static_cast<int>(n_y), "input").qubits();
  mc.w = mc.circuit.add_register("w", static_cast<int>(n_w), "output").qubits();
  PhaseCompiler pc(cfg.compile);
  QftBuilder qb(cfg.qft, pc);
  qb.emit_qft(mc.circuit, mc.w);
  PhaseAngle phi{2.0 * std::numbers::pi, scale / Rational(BigInt::pow2(n_w))};
  pc.emit_phase_triple(mc.circuit, mc.x, mc.y, mc.w, phi);
  qb.emit_iqft(mc.circuit, mc.w);
  return mc;
}

// Output register n + pad qubits wide; the phase is 2 pi a x z / N, so
// multiples of N in the product become multiples of 2 pi in the phase.
inline MultiplierCircuit u_cq_mod(const BigInt& a, const BigInt& N, std::size_t n,
                                  std::size_t pad, MultiplierConfig cfg = {}) {
  if (!(BigInt(0) < N) || !(N < BigInt::pow2(n) + BigInt(1)))
    throw std::invalid_argument("u_cq_mod: need 0 < N <= 2^n");
  MultiplierCircuit mc;
  std::size_t n_w = n + pad;
  mc.x = mc.circuit.add_register("x", static_cast<int>(n), "input").qubits();
  mc.w = mc.circuit.add_register("w", static_cast<int>(n_w), "output").qubits();
  PhaseCompiler pc(cfg.compile);
  QftBuilder qb(cfg.qft, pc);
  qb.emit_qft(mc.circuit, mc.w);
  PhaseAngle phi{2.0 * std::numbers::pi, Rational(a, N)};
  pc.emit_phase_product(mc.circuit, mc.x, mc.w, phi);
  qb.emit_iqft(mc.circuit, mc.w);
  return mc;
}

// ---- Algorithm: in-place classical-quantum modular multiplication ----

struct InplaceModMul {
  Circuit circuit;
  std::vector<int> x;     // n qubits, holds c x mod N afterwards
  std::vector<int> xext;  // x plus the top overflow qubit
  std::vector<int> w;     // m fraction qubits, returned to |0>
  int compare_bit = -1;   // comparator ancilla, returned to |0>
  std::size_t n = 0, m = 0;
};

inline std::size_t modmul_fraction_bits(std::size_t n, double eta) {
  return n + static_cast<std::size_t>(std::ceil(2.0 * std::log(2.0 + 1.0 / (2.0 * eta))));
}

inline InplaceModMul inplace_mod_mul(const BigInt& c, const BigInt& N, double eta,
                                     MultiplierConfig cfg = {}) {
  if (!(BigInt::gcd(c, N) == BigInt(1)))
    throw std::invalid_argument("inplace_mod_mul: gcd(c, N) != 1");
  InplaceModMul out;
  out.n = N.bit_length();
  out.m = modmul_fraction_bits(out.n, eta);
  const std::size_t n = out.n, m = out.m;

  out.x = out.circuit.add_register("x", static_cast<int>(n), "input").qubits();
  int top = out.circuit.add_register("x_overflow", 1, "ancilla").qubits()[0];
  out.xext = out.x;
  out.xext.push_back(top);
  out.w = out.circuit.add_register("w", static_cast<int>(m), "ancilla").qubits();
  out.compare_bit = out.circuit.add_register("cmp", 1, "ancilla").qubits()[0];

  PhaseCompiler pc(cfg.compile);
  QftBuilder qb(cfg.qft, pc);
  Circuit& cc = out.circuit;

  const BigInt c1 = BigInt::mod_floor(c - BigInt(1), N);
  const BigInt cinv = BigInt::mod_inverse(c, N);
  const BigInt c2 = BigInt::mod_floor(BigInt(1) - cinv, N);

  // Step 1: w <- 2^m * ((c-1) x mod N) / N, as a phase-estimated fraction.
  qb.emit_qft(cc, out.w);
  pc.emit_phase_product(cc, out.x, out.w, {2.0 * std::numbers::pi, Rational(c1, N)});
  qb.emit_iqft(cc, out.w);

  // Step 2: x (with one overflow qubit) += N w / 2^m.
  auto add_Nw = [&](bool subtract) {
    qb.emit_qft(cc, out.xext);
    Rational s(N, BigInt::pow2(m) * BigInt::pow2(out.xext.size()));
    if (subtract) s = -s;
    pc.emit_phase_product(cc, out.w, out.xext, {2.0 * std::numbers::pi, s});
    qb.emit_iqft(cc, out.xext);
  };
  add_Nw(false);

  // Step 3: subtract N; the wrap bit marks values below N; add back under it.
  draper_add_const(cc, out.xext, N, {}, /*subtract=*/true, cfg.qft);
  emit_cnot(cc, out.xext.back(), out.compare_bit);
  draper_add_const(cc, out.xext, N, {out.compare_bit}, /*subtract=*/false, cfg.qft);

  // Step 4: uncompute the comparator: cx mod N < N w exactly when the
  // first register wrapped above. Subtract N w, read the sign, restore.
  emit_x(cc, out.compare_bit);
  add_Nw(true);
  emit_cnot(cc, out.xext.back(), out.compare_bit);
  add_Nw(false);

  // Step 5: w -= 2^m * ((1 - c^-1)(c x) mod N) / N, clearing it.
  qb.emit_qft(cc, out.w);
  pc.emit_phase_product(cc, out.xext, out.w,
                        {2.0 * std::numbers::pi, -Rational(c2, N)});
  qb.emit_iqft(cc, out.w);

  return out;
}

}  // namespace qmf
