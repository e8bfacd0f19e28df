#pragma once

// Gate-list circuit IR. Gates reference flat qubit indices; registers name
// contiguous index ranges. Emission goes through a GateSink so the same
// synthesis code can build explicit circuits or just count gates.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmf {

enum class GateKind : std::uint8_t {
  H,
  X,
  CNOT,
  Toffoli,
  CRphi,
  CCRphi,
  Rphi,
  Measure,
};

inline const char* gate_kind_name(GateKind k) {
  switch (k) {
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::CNOT: return "cnot";
    case GateKind::Toffoli: return "toffoli";
    case GateKind::CRphi: return "crphi";
    case GateKind::CCRphi: return "ccrphi";
    case GateKind::Rphi: return "rphi";
    case GateKind::Measure: return "measure";
  }
  return "?";
}

struct Gate {
  GateKind kind = GateKind::X;
  int q0 = -1;          // target (or first operand)
  int q1 = -1;          // control / second operand
  int q2 = -1;          // second control (Toffoli, CCRphi)
  double angle = 0.0;   // CRphi/CCRphi/Rphi
  int classical_bit = -1;   // Measure destination, or the condition for a
                            // classically controlled gate (cond_bit >= 0)
  int cond_bit = -1;

  int arity() const {
    if (q2 >= 0) return 3;
    if (q1 >= 0) return 2;
    return 1;
  }
};

struct QubitRegister {
  std::string name;
  int offset = 0;
  int size = 0;
  std::string role;  // input | output | ancilla | dirty

  int operator[](int i) const { return offset + i; }
  std::vector<int> qubits() const {
    std::vector<int> v(size);
    for (int i = 0; i < size; ++i) v[i] = offset + i;
    return v;
  }
};

// Per-gate-class tallies plus ancilla accounting.
struct GateCensus {
  std::uint64_t toffoli = 0;
  std::uint64_t crphi = 0;
  std::uint64_t ccrphi = 0;
  std::uint64_t rphi = 0;
  std::uint64_t clifford = 0;  // H, X, CNOT, Swap
  std::uint64_t measure = 0;

  std::uint64_t total() const { return toffoli + crphi + ccrphi + rphi + clifford + measure; }

  void add_gate(GateKind k) {
    switch (k) {
      case GateKind::Toffoli: ++toffoli; break;
      case GateKind::CRphi: ++crphi; break;
      case GateKind::CCRphi: ++ccrphi; break;
      case GateKind::Rphi: ++rphi; break;
      case GateKind::Measure: ++measure; break;
      default: ++clifford; break;
    }
  }
  GateCensus& operator+=(const GateCensus& o) {
    toffoli += o.toffoli;
    crphi += o.crphi;
    ccrphi += o.ccrphi;
    rphi += o.rphi;
    clifford += o.clifford;
    measure += o.measure;
    return *this;
  }
  friend bool operator==(const GateCensus& a, const GateCensus& b) {
    return a.toffoli == b.toffoli && a.crphi == b.crphi && a.ccrphi == b.ccrphi &&
           a.rphi == b.rphi && a.clifford == b.clifford && a.measure == b.measure;
  }
};

class GateSink {
public:
  virtual ~GateSink() = default;
  virtual void on_gate(const Gate& g) = 0;
  // Ancilla lifecycle: returns the first index of `count` fresh qubits.
  virtual int alloc_ancilla(int count, const std::string& name) = 0;
  virtual void release_ancilla(int first, int count) = 0;
  virtual int ancilla_in_flight() const = 0;
};

class Circuit;

class CountingSink final : public GateSink {
public:
  void on_gate(const Gate& g) override { census_.add_gate(g.kind); }
  int alloc_ancilla(int count, const std::string&) override {
    int first = next_;
    next_ += count;
    in_flight_ += count;
    if (in_flight_ > high_water_) high_water_ = in_flight_;
    return first;
  }
  void release_ancilla(int, int count) override { in_flight_ -= count; }
  int ancilla_in_flight() const override { return in_flight_; }

  const GateCensus& census() const { return census_; }
  int ancilla_high_water() const { return high_water_; }

  // Splices a memoized subtree into the running totals.
  void absorb(const GateCensus& census, int subtree_high_water) {
    census_ += census;
    if (in_flight_ + subtree_high_water > high_water_)
      high_water_ = in_flight_ + subtree_high_water;
  }

private:
  GateCensus census_;
  int next_ = 1 << 28;  // fake index space; counters only
  int in_flight_ = 0;
  int high_water_ = 0;
};

class Circuit final : public GateSink {
public:
  QubitRegister& add_register(const std::string& name, int size, const std::string& role) {
    QubitRegister r{name, qubit_count_, size, role};
    registers_.push_back(r);
    qubit_count_ += size;
    return registers_.back();
  }

  void on_gate(const Gate& g) override {
    check_operands(g);
    gates_.push_back(g);
    census_.add_gate(g.kind);
  }

  int alloc_ancilla(int count, const std::string& name) override {
    // Reuse released indices when the shape matches; otherwise grow.
    int first = -1;
    for (std::size_t i = 0; i < free_pool_.size(); ++i) {
      if (free_pool_[i].second == count) {
        first = free_pool_[i].first;
        free_pool_.erase(free_pool_.begin() + static_cast<std::ptrdiff_t>(i));
        break;
      }
    }
    if (first < 0) {
      first = qubit_count_;
      add_register(name, count, "ancilla");
    }
    ancilla_in_flight_ += count;
    if (ancilla_in_flight_ > ancilla_high_water_) ancilla_high_water_ = ancilla_in_flight_;
    return first;
  }
  void release_ancilla(int first, int count) override {
    ancilla_in_flight_ -= count;
    free_pool_.push_back({first, count});
  }
  int ancilla_in_flight() const override { return ancilla_in_flight_; }

  const std::vector<QubitRegister>& registers() const { return registers_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::vector<Gate>& mutable_gates() { return gates_; }
  int qubit_count() const { return qubit_count_; }
  int ancilla_high_water() const { return ancilla_high_water_; }
  const GateCensus& census() const { return census_; }

  const QubitRegister* find_register(const std::string& name) const {
    for (const auto& r : registers_)
      if (r.name == name) return &r;
    return nullptr;
  }

  int classical_bit_count() const {
    int n = 0;
    for (const auto& g : gates_) {
      if (g.classical_bit >= n) n = g.classical_bit + 1;
      if (g.cond_bit >= n) n = g.cond_bit + 1;
    }
    return n;
  }

private:
  std::vector<QubitRegister> registers_;
  std::vector<Gate> gates_;
  GateCensus census_;
  int qubit_count_ = 0;
  int ancilla_in_flight_ = 0;
  int ancilla_high_water_ = 0;
  std::vector<std::pair<int, int>> free_pool_;

  void check_operands(const Gate& g) const {
    auto ok = [&](int q) { return q >= 0 && q < qubit_count_; };
    if (!ok(g.q0)) throw std::out_of_range("gate operand q0 out of range");
    if (g.q1 >= 0 && !ok(g.q1)) throw std::out_of_range("gate operand q1 out of range");
    if (g.q2 >= 0 && !ok(g.q2)) throw std::out_of_range("gate operand q2 out of range");
    if (g.q1 >= 0 && g.q1 == g.q0) throw std::invalid_argument("duplicate gate operands");
    if (g.q2 >= 0 && (g.q2 == g.q0 || g.q2 == g.q1))
      throw std::invalid_argument("duplicate gate operands");
  }
};

// Convenience emitters.
inline void emit_h(GateSink& s, int q) { s.on_gate({GateKind::H, q}); }
inline void emit_x(GateSink& s, int q) { s.on_gate({GateKind::X, q}); }
inline void emit_cnot(GateSink& s, int ctrl, int tgt) {
  Gate g{GateKind::CNOT, tgt};
  g.q1 = ctrl;
  s.on_gate(g);
}
inline void emit_toffoli(GateSink& s, int c1, int c2, int tgt) {
  Gate g{GateKind::Toffoli, tgt};
  g.q1 = c1;
  g.q2 = c2;
  s.on_gate(g);
}
inline void emit_rphi(GateSink& s, int q, double angle) {
  Gate g{GateKind::Rphi, q};
  g.angle = angle;
  s.on_gate(g);
}
inline void emit_crphi(GateSink& s, int a, int b, double angle) {
  Gate g{GateKind::CRphi, a};
  g.q1 = b;
  g.angle = angle;
  s.on_gate(g);
}
inline void emit_ccrphi(GateSink& s, int a, int b, int c, double angle) {
  Gate g{GateKind::CCRphi, a};
  g.q1 = b;
  g.q2 = c;
  g.angle = angle;
  s.on_gate(g);
}
inline void emit_swap(GateSink& s, int a, int b) {
  emit_cnot(s, a, b);
  emit_cnot(s, b, a);
  emit_cnot(s, a, b);
}

// Controlled phase rotation with 0, 1 or 2 explicit qubits plus an optional
// extra control; collapses to the smallest gate that realizes the product.
inline void emit_phase_on_bits(GateSink& s, int ctrl, int a, int b, double angle) {
  std::array<int, 3> qs{};
  int n = 0;
  if (ctrl >= 0) qs[n++] = ctrl;
  if (a >= 0) qs[n++] = a;
  if (b >= 0) qs[n++] = b;
  if (n == 0) return;  // global phase; nothing to emit on bits
  if (n == 1) {
    emit_rphi(s, qs[0], angle);
  } else if (n == 2) {
    emit_crphi(s, qs[0], qs[1], angle);
  } else {
    emit_ccrphi(s, qs[0], qs[1], qs[2], angle);
  }
}

}  // namespace qmf
