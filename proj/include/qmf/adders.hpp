#pragma once

// CDKM/Cuccaro in-place ripple-carry adder with an explicit incoming-carry
// qubit. |a>|b>|cin> -> |a>|a+b+cin mod 2^|b|>|cin>. No carry-out qubit is
// written; between the MAJ and UMA cascades the outgoing carry sits on the
// top addend qubit, and callers may pause there to rotate against it.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "qmf/circuit.hpp"

namespace qmf {

namespace cuccaro {

inline void maj(GateSink& s, int c, int b, int a) {
  emit_cnot(s, a, b);
  emit_cnot(s, a, c);
  emit_toffoli(s, c, b, a);
}
inline void uma(GateSink& s, int c, int b, int a) {
  emit_toffoli(s, c, b, a);
  emit_cnot(s, a, c);
  emit_cnot(s, c, b);
}
inline void maj_inv(GateSink& s, int c, int b, int a) {
  emit_toffoli(s, c, b, a);
  emit_cnot(s, a, c);
  emit_cnot(s, a, b);
}
inline void uma_inv(GateSink& s, int c, int b, int a) {
  emit_cnot(s, c, b);
  emit_cnot(s, a, c);
  emit_toffoli(s, c, b, a);
}

// MAJ cascade; returns the qubit currently holding the outgoing carry.
inline int first_half(GateSink& s, std::span<const int> a, std::span<const int> b,
                      int carry_in) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("cuccaro: operand length mismatch");
  int chain = carry_in;
  for (std::size_t i = 0; i < a.size(); ++i) {
    maj(s, chain, b[i], a[i]);
    chain = a[i];
  }
  return chain;
}

inline void second_half(GateSink& s, std::span<const int> a, std::span<const int> b,
                        int carry_in) {
  for (std::size_t i = a.size(); i-- > 0;) {
    int chain = i == 0 ? carry_in : a[i - 1];
    uma(s, chain, b[i], a[i]);
  }
}

inline void add(GateSink& s, std::span<const int> a, std::span<const int> b, int carry_in) {
  first_half(s, a, b, carry_in);
  second_half(s, a, b, carry_in);
}

// Exact reversal of add(): uncomputes |a+b+cin> back to |b>.
inline void add_inverse(GateSink& s, std::span<const int> a, std::span<const int> b,
                        int carry_in) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    int chain = i == 0 ? carry_in : a[i - 1];
    uma_inv(s, chain, b[i], a[i]);
  }
  for (std::size_t i = a.size(); i-- > 0;) {
    int chain = i == 0 ? carry_in : a[i - 1];
    maj_inv(s, chain, b[i], a[i]);
  }
}

}  // namespace cuccaro

// Spec-level convenience: the plain adder on named spans.
inline void cuccaro_add(GateSink& s, std::span<const int> a, std::span<const int> b,
                        int carry_in) {
  cuccaro::add(s, a, b, carry_in);
}

}  // namespace qmf
