#pragma once

// Dense statevector simulator, the ground-truth oracle for every compiled
// circuit at desk scale. Qubit i is bit i of the basis index.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "qmf/circuit.hpp"

namespace qmf {

using cdouble = std::complex<double>;

struct SimConfig {
  int qubit_limit = 24;
  std::uint64_t seed = 0;
};

class StateVector {
public:
  StateVector() = default;
  StateVector(int nqubits, std::uint64_t basis) : n_(nqubits) {
    amps_.assign(std::size_t(1) << n_, cdouble(0, 0));
    amps_[basis] = 1.0;
  }

  int qubits() const { return n_; }
  std::size_t dim() const { return amps_.size(); }
  const std::vector<cdouble>& amplitudes() const { return amps_; }
  std::vector<cdouble>& amplitudes() { return amps_; }
  cdouble amp(std::uint64_t basis) const { return amps_[basis]; }

  double norm() const {
    double s = 0;
    for (const auto& a : amps_) s += std::norm(a);
    return std::sqrt(s);
  }

  cdouble inner(const StateVector& other) const {
    cdouble s = 0;
    for (std::size_t i = 0; i < amps_.size(); ++i) s += std::conj(amps_[i]) * other.amps_[i];
    return s;
  }

  // |<target basis|state>|^2
  double fidelity_with_basis(std::uint64_t basis) const { return std::norm(amps_[basis]); }

  void apply_h(int q) {
    const std::size_t bit = std::size_t(1) << q;
    const double inv = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (i & bit) continue;
      cdouble a = amps_[i], b = amps_[i | bit];
      amps_[i] = (a + b) * inv;
      amps_[i | bit] = (a - b) * inv;
    }
  }
  void apply_x(int q) {
    const std::size_t bit = std::size_t(1) << q;
    for (std::size_t i = 0; i < amps_.size(); ++i)
      if (!(i & bit)) std::swap(amps_[i], amps_[i | bit]);
  }
  void apply_cnot(int ctrl, int tgt) {
    const std::size_t cb = std::size_t(1) << ctrl, tb = std::size_t(1) << tgt;
    for (std::size_t i = 0; i < amps_.size(); ++i)
      if ((i & cb) && !(i & tb)) std::swap(amps_[i], amps_[i | tb]);
  }
  void apply_toffoli(int c1, int c2, int tgt) {
    const std::size_t b1 = std::size_t(1) << c1, b2 = std::size_t(1) << c2,
                      tb = std::size_t(1) << tgt;
    for (std::size_t i = 0; i < amps_.size(); ++i)
      if ((i & b1) && (i & b2) && !(i & tb)) std::swap(amps_[i], amps_[i | tb]);
  }
  void apply_phase(std::size_t mask, double angle) {
    const cdouble ph = std::polar(1.0, angle);
    for (std::size_t i = 0; i < amps_.size(); ++i)
      if ((i & mask) == mask) amps_[i] *= ph;
  }

  // Measurement: collapses per the rng, returns the outcome.
  int measure(int q, std::mt19937_64& rng) {
    const std::size_t bit = std::size_t(1) << q;
    double p1 = 0;
    for (std::size_t i = 0; i < amps_.size(); ++i)
      if (i & bit) p1 += std::norm(amps_[i]);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    int outcome = dist(rng) < p1 ? 1 : 0;
    double keep = outcome ? p1 : 1.0 - p1;
    double scale = keep > 0 ? 1.0 / std::sqrt(keep) : 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      bool is1 = (i & bit) != 0;
      if (is1 == (outcome == 1))
        amps_[i] *= scale;
      else
        amps_[i] = 0;
    }
    return outcome;
  }

private:
  int n_ = 0;
  std::vector<cdouble> amps_;
};

class Simulator {
public:
  explicit Simulator(SimConfig cfg = {}) : cfg_(cfg) {}

  StateVector run(const Circuit& c, std::uint64_t input_basis) const {
    check_limit(c);
    StateVector sv(c.qubit_count(), input_basis);
    return run_state(c, std::move(sv));
  }

  // Applies the circuit to a caller-prepared state.
  StateVector run_state(const Circuit& c, StateVector sv) const {
    check_limit(c);
    std::mt19937_64 rng(cfg_.seed);
    std::vector<int> cbits(static_cast<std::size_t>(c.classical_bit_count()), 0);
    for (const auto& g : c.gates()) apply_gate(sv, g, rng, cbits);
    return sv;
  }

  void check_limit(const Circuit& c) const {
    if (c.qubit_count() > cfg_.qubit_limit)
      throw std::runtime_error("simulator: qubit limit exceeded (" +
                               std::to_string(c.qubit_count()) + " > " +
                               std::to_string(cfg_.qubit_limit) + ")");
  }

  static void apply_gate(StateVector& sv, const Gate& g, std::mt19937_64& rng,
                         std::vector<int>& cbits) {
    if (g.cond_bit >= 0 && !cbits[static_cast<std::size_t>(g.cond_bit)]) return;
    switch (g.kind) {
      case GateKind::H: sv.apply_h(g.q0); break;
      case GateKind::X: sv.apply_x(g.q0); break;
      case GateKind::CNOT: sv.apply_cnot(g.q1, g.q0); break;
      case GateKind::Toffoli: sv.apply_toffoli(g.q1, g.q2, g.q0); break;
      case GateKind::Rphi: sv.apply_phase(std::size_t(1) << g.q0, g.angle); break;
      case GateKind::CRphi:
        sv.apply_phase((std::size_t(1) << g.q0) | (std::size_t(1) << g.q1), g.angle);
        break;
      case GateKind::CCRphi:
        sv.apply_phase((std::size_t(1) << g.q0) | (std::size_t(1) << g.q1) |
                           (std::size_t(1) << g.q2),
                       g.angle);
        break;
      case GateKind::Measure: {
        int out = sv.measure(g.q0, rng);
        if (g.classical_bit >= 0) {
          if (g.classical_bit >= static_cast<int>(cbits.size()))
            cbits.resize(static_cast<std::size_t>(g.classical_bit) + 1, 0);
          cbits[static_cast<std::size_t>(g.classical_bit)] = out;
        }
        break;
      }
    }
  }

  const SimConfig& config() const { return cfg_; }

private:
  SimConfig cfg_;
};

// The phased basis-permutation a correct arithmetic circuit realizes.
struct ActionTable {
  std::vector<std::uint64_t> output;  // output basis per input basis
  std::vector<cdouble> phase;         // unit phase per input basis
};

struct NonPermutationError : std::runtime_error {
  explicit NonPermutationError(const std::string& what) : std::runtime_error(what) {}
};

inline ActionTable action_table(const Circuit& c, const Simulator& sim,
                                double amp_tol = 1e-9) {
  std::size_t dim = std::size_t(1) << c.qubit_count();
  ActionTable t;
  t.output.resize(dim);
  t.phase.resize(dim);
  std::vector<bool> hit(dim, false);
  for (std::uint64_t x = 0; x < dim; ++x) {
    StateVector sv = sim.run(c, x);
    std::size_t best = 0;
    double best_mag = -1;
    for (std::size_t i = 0; i < dim; ++i) {
      double m = std::norm(sv.amp(i));
      if (m > best_mag) {
        best_mag = m;
        best = i;
      }
    }
    if (best_mag < 1.0 - amp_tol)
      throw NonPermutationError("leaked superposition at input " + std::to_string(x));
    t.output[x] = best;
    t.phase[x] = sv.amp(best) / std::abs(sv.amp(best));
    if (hit[best]) throw NonPermutationError("not a bijection");
    hit[best] = true;
  }
  return t;
}

// Max over basis states of |1 - <expected|actual>| against an analytic spec
// basis -> (basis, unit phase).
inline double verify_against(
    const Circuit& c, const Simulator& sim,
    const std::function<std::pair<std::uint64_t, cdouble>(std::uint64_t)>& spec) {
  std::size_t dim = std::size_t(1) << c.qubit_count();
  double worst = 0;
  for (std::uint64_t x = 0; x < dim; ++x) {
    StateVector sv = sim.run(c, x);
    auto [want_basis, want_phase] = spec(x);
    cdouble overlap = std::conj(want_phase) * sv.amp(want_basis);
    double dev = std::abs(cdouble(1, 0) - overlap);
    if (dev > worst) worst = dev;
  }
  return worst;
}

inline double fidelity(const StateVector& state, std::uint64_t target_basis) {
  return state.fidelity_with_basis(target_basis);
}

// Max deviation of a diagonal circuit from the phases `angle_of_basis`,
// checked over every input basis state at once by running the uniform
// superposition of the non-ancilla registers. Ancilla registers must
// start and finish in |0>; anything they retain counts as deviation.
inline double verify_diagonal(const Circuit& c, const Simulator& sim,
                              const std::function<double(std::uint64_t)>& angle_of_basis) {
  sim.check_limit(c);
  std::uint64_t anc_mask = 0;
  int input_bits = 0;
  for (const auto& r : c.registers()) {
    bool anc = r.role == "ancilla";
    for (int i = 0; i < r.size; ++i) {
      if (anc)
        anc_mask |= std::uint64_t(1) << (r.offset + i);
      else
        ++input_bits;
    }
  }
  StateVector sv(c.qubit_count(), 0);
  double amp = std::pow(0.5, input_bits / 2.0);
  auto& amps = sv.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i)
    amps[i] = (i & anc_mask) ? cdouble(0, 0) : cdouble(amp, 0);
  StateVector out = sim.run_state(c, std::move(sv));
  double worst = 0;
  for (std::uint64_t i = 0; i < out.dim(); ++i) {
    if (i & anc_mask) {
      worst = std::max(worst, std::abs(out.amp(i)) / amp);
      continue;
    }
    cdouble expect = std::polar(amp, angle_of_basis(i));
    worst = std::max(worst, std::abs(out.amp(i) - expect) / amp);
  }
  return worst;
}

}  // namespace qmf
