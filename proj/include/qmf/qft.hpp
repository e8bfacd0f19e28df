#pragma once

// Quantum Fourier transforms and phase-gradient machinery.
//
// qft() produces the exact DFT matrix on the register (bit-reversal swaps
// included). The fast variant is the recursive three-step construction:
// transform the high half, apply PhaseProduct(2pi/2^n) between the low half
// and the transformed high half, transform the low half, then re-order the
// two blocks. Rotations below 2*pi*eta are dropped when pruning is on.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "qmf/circuit.hpp"
#include "qmf/phase_compiler.hpp"

namespace qmf {

struct QftConfig {
  enum class Variant { Standard, Fast, PhaseGradient };
  Variant variant = Variant::Standard;
  std::size_t fast_base = 4;       // below this the fast variant falls back
  double pruning_threshold = 1e-12;  // per-qubit precision eta
  bool prune = false;
  CompileConfig compile;           // PhaseProduct config for the fast variant

  static QftConfig standard() { return {}; }
  static QftConfig fast(std::size_t base = 4) {
    QftConfig c;
    c.variant = Variant::Fast;
    c.fast_base = base;
    return c;
  }
};

namespace detail {

inline bool keep_rotation(const QftConfig& cfg, double angle) {
  if (!cfg.prune) return true;
  return std::abs(angle) >= 2.0 * std::numbers::pi * cfg.pruning_threshold;
}

// Textbook cascade. Output is bit-reversed; callers append swaps.
inline void qft_rotations(GateSink& sink, const std::vector<int>& q, const QftConfig& cfg) {
  const std::size_t n = q.size();
  for (std::size_t i = n; i-- > 0;) {
    emit_h(sink, q[i]);
    for (std::size_t j = i; j-- > 0;) {
      double angle = 2.0 * std::numbers::pi / std::pow(2.0, double(i - j + 1));
      if (keep_rotation(cfg, angle)) emit_crphi(sink, q[j], q[i], angle);
    }
  }
}

inline void reverse_bits_swaps(GateSink& sink, const std::vector<int>& q) {
  for (std::size_t i = 0; i < q.size() / 2; ++i) emit_swap(sink, q[i], q[q.size() - 1 - i]);
}

}  // namespace detail

class QftBuilder {
public:
  explicit QftBuilder(QftConfig cfg = {}) : cfg_(cfg), compiler_(cfg.compile) {}

  QftBuilder(QftConfig cfg, PhaseCompiler& shared)
      : cfg_(cfg), compiler_(cfg.compile), shared_(&shared) {}

  // |x> -> 2^{-n/2} sum_z exp(2 pi i x z / 2^n) |z>, standard bit order.
  void emit_qft(GateSink& sink, const std::vector<int>& q) {
    if (cfg_.variant == QftConfig::Variant::Fast && q.size() > cfg_.fast_base &&
        q.size() >= 2) {
      emit_fast(sink, q);
      return;
    }
    if (cfg_.variant == QftConfig::Variant::PhaseGradient) {
      emit_gradient_flavored(sink, q);
      return;
    }
    detail::qft_rotations(sink, q, cfg_);
    detail::reverse_bits_swaps(sink, q);
  }

  // Standard cascade with each controlled rotation lowered to a Toffoli
  // pair around a plain rotation on a shared scratch qubit, the form the
  // gradient-state arithmetic consumes.
  void emit_gradient_flavored(GateSink& sink, const std::vector<int>& q) {
    const std::size_t n = q.size();
    int scratch = sink.alloc_ancilla(1, "rot");
    for (std::size_t i = n; i-- > 0;) {
      emit_h(sink, q[i]);
      for (std::size_t j = i; j-- > 0;) {
        double angle = 2.0 * std::numbers::pi / std::pow(2.0, double(i - j + 1));
        if (!detail::keep_rotation(cfg_, angle)) continue;
        emit_toffoli(sink, q[j], q[i], scratch);
        emit_rphi(sink, scratch, angle);
        emit_toffoli(sink, q[j], q[i], scratch);
      }
    }
    sink.release_ancilla(scratch, 1);
    detail::reverse_bits_swaps(sink, q);
  }

  void emit_iqft(GateSink& sink, const std::vector<int>& q) {
    // Record the forward transform (allocations pass through so ancilla
    // indices stay valid), then emit it reversed with negated angles.
    std::vector<Gate> gates;
    struct Rec final : GateSink {
      GateSink* inner = nullptr;
      std::vector<Gate>* out = nullptr;
      void on_gate(const Gate& g) override { out->push_back(g); }
      int alloc_ancilla(int count, const std::string& name) override {
        return inner->alloc_ancilla(count, name);
      }
      void release_ancilla(int first, int count) override {
        inner->release_ancilla(first, count);
      }
      int ancilla_in_flight() const override { return inner->ancilla_in_flight(); }
    } rec;
    rec.inner = &sink;
    rec.out = &gates;
    emit_qft(rec, q);
    for (std::size_t i = gates.size(); i-- > 0;) {
      Gate g = gates[i];
      if (g.kind == GateKind::CRphi || g.kind == GateKind::CCRphi || g.kind == GateKind::Rphi)
        g.angle = -g.angle;
      sink.on_gate(g);
    }
  }

  Circuit qft_circuit(std::size_t n) {
    Circuit c;
    auto q = c.add_register("q", static_cast<int>(n), "input").qubits();
    emit_qft(c, q);
    return c;
  }

private:
  QftConfig cfg_;
  PhaseCompiler compiler_;
  PhaseCompiler* shared_ = nullptr;

  PhaseCompiler& compiler() { return shared_ ? *shared_ : compiler_; }

  void emit_fast(GateSink& sink, const std::vector<int>& q) {
    const std::size_t n = q.size();
    const std::size_t m = n / 2;
    std::vector<int> low(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(m));
    std::vector<int> high(q.begin() + static_cast<std::ptrdiff_t>(m), q.end());
    // Step 1: transform the high block (value y): phases e^{2pi i y z_b / 2^{n-m}}.
    emit_qft(sink, high);
    // Step 2: cross phase e^{2pi i x z_b / 2^n} via PhaseProduct.
    double phi = 2.0 * std::numbers::pi / std::pow(2.0, double(n));
    compiler().emit_phase_product(sink, low, high, PhaseAngle{phi, Rational(1)});
    // Step 3: transform the low block: phases e^{2pi i x z_t / 2^m}.
    emit_qft(sink, low);
    // The output value is z_b + 2^{n-m} z_t with z_t on the low block:
    // rotate the blocks into standard order.
    block_reorder(sink, q, m);
  }

  // Moves the low m qubits to the top: permutation q[i] -> q[(i + (n-m)) % n],
  // realized as a reversal network of swaps.
  static void block_reorder(GateSink& sink, const std::vector<int>& q, std::size_t m) {
    const std::size_t n = q.size();
    if (m == 0 || m == n) return;
    auto reverse_range = [&](std::size_t a, std::size_t b) {
      while (a + 1 < b) {
        emit_swap(sink, q[a], q[b - 1]);
        ++a;
        --b;
      }
    };
    reverse_range(0, m);
    reverse_range(m, n);
    reverse_range(0, n);
  }
};

// --- phase gradient -------------------------------------------------------

// |Phi> = 2^{-m/2} sum_w e^{-2 pi i w / 2^m} |w>, a product state.
inline void phase_gradient_prepare(GateSink& sink, const std::vector<int>& grad) {
  const std::size_t m = grad.size();
  for (std::size_t j = 0; j < m; ++j) {
    emit_h(sink, grad[j]);
    double angle = -2.0 * std::numbers::pi * std::pow(2.0, double(j)) / std::pow(2.0, double(m));
    emit_rphi(sink, grad[j], angle);
  }
}

inline Circuit phase_gradient_prepare_circuit(std::size_t m) {
  Circuit c;
  auto g = c.add_register("grad", static_cast<int>(m), "ancilla").qubits();
  phase_gradient_prepare(c, g);
  return c;
}

// Adds the classical constant a into the register mod 2^n via the QFT
// sandwich; rotations may carry extra controls. Exact as a unitary.
inline void draper_add_const(GateSink& sink, const std::vector<int>& reg, const BigInt& a,
                             const std::vector<int>& controls = {}, bool subtract = false,
                             const QftConfig& qcfg = {}) {
  QftBuilder qb(qcfg);
  qb.emit_qft(sink, reg);
  const std::size_t n = reg.size();
  for (std::size_t j = 0; j < n; ++j) {
    // phase contribution of bit j: 2 pi a 2^j / 2^n
    Rational turns(BigInt::mod_floor(a << j, BigInt::pow2(n)), BigInt::pow2(n));
    double angle = 2.0 * std::numbers::pi * turns.to_double();
    if (subtract) angle = -angle;
    if (angle == 0.0) continue;
    if (controls.empty())
      emit_rphi(sink, reg[j], angle);
    else if (controls.size() == 1)
      emit_crphi(sink, controls[0], reg[j], angle);
    else
      emit_ccrphi(sink, controls[0], controls[1], reg[j], angle);
  }
  qb.emit_iqft(sink, reg);
}

// Rotation by angle via the gradient register: increment by round(2^m
// angle / 2pi). The gradient state is an eigenstate of the addition, so it
// is returned intact while the phase e^{i angle'} is kicked back.
inline std::int64_t phase_gradient_increment(double angle, std::size_t m) {
  double turns = angle / (2.0 * std::numbers::pi);
  double scaled = turns * std::pow(2.0, double(m));
  std::int64_t a = static_cast<std::int64_t>(std::llround(scaled));
  std::int64_t mod = std::int64_t(1) << m;
  a %= mod;
  if (a < 0) a += mod;
  return a;
}

inline void phase_gradient_rotate(GateSink& sink, const std::vector<int>& grad, double angle,
                                  const std::vector<int>& controls = {}) {
  std::int64_t a = phase_gradient_increment(angle, grad.size());
  if (a == 0) return;
  draper_add_const(sink, grad, BigInt(a), controls);
}

}  // namespace qmf
