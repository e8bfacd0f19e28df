#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "qmf/qft.hpp"
#include "qmf/simulator.hpp"

using namespace qmf;

namespace {

// Columns of the circuit unitary via basis-state simulation.
std::vector<std::vector<cdouble>> circuit_matrix(const Circuit& c) {
  Simulator sim;
  std::size_t dim = std::size_t(1) << c.qubit_count();
  std::vector<std::vector<cdouble>> m(dim);
  for (std::uint64_t x = 0; x < dim; ++x) {
    auto sv = sim.run(c, x);
    m[x] = sv.amplitudes();
  }
  return m;
}

double max_dev_from_dft(const Circuit& c, std::size_t n) {
  auto m = circuit_matrix(c);
  std::size_t dim = std::size_t(1) << n;
  double inv = 1.0 / std::sqrt(double(dim));
  double worst = 0;
  for (std::uint64_t x = 0; x < dim; ++x)
    for (std::uint64_t z = 0; z < dim; ++z) {
      cdouble want = std::polar(inv, 2.0 * std::numbers::pi * double(x * z) / double(dim));
      worst = std::max(worst, std::abs(m[x][z] - want));
    }
  return worst;
}

}  // namespace

TEST_CASE("qft(1) is a single H") {
  QftBuilder qb;
  auto c = qb.qft_circuit(1);
  REQUIRE(c.gates().size() == 1);
  CHECK(c.gates()[0].kind == GateKind::H);
}

TEST_CASE("standard qft gate counts and matrix") {
  for (std::size_t n = 2; n <= 6; ++n) {
    QftBuilder qb;
    auto c = qb.qft_circuit(n);
    CHECK(c.census().crphi == n * (n - 1) / 2);
    CHECK(c.ancilla_high_water() == 0);
    CHECK(max_dev_from_dft(c, n) < 1e-9);
  }
}

TEST_CASE("qft on |0> gives the uniform superposition") {
  QftBuilder qb;
  auto c = qb.qft_circuit(5);
  Simulator sim;
  auto sv = sim.run(c, 0);
  double inv = std::pow(2.0, -2.5);
  for (std::uint64_t i = 0; i < sv.dim(); ++i)
    CHECK(std::abs(sv.amp(i) - cdouble(inv, 0)) < 1e-12);
}

TEST_CASE("fast qft equals standard qft as a matrix") {
  for (std::size_t n = 2; n <= 8; ++n) {
    QftConfig cfg = QftConfig::fast(2);
    cfg.compile.overflow_mode = OverflowMode::ZeroAncilla;
    cfg.compile.n_base_double = 4;
    QftBuilder qb(cfg);
    auto c = qb.qft_circuit(n);
    CAPTURE(n);
    CHECK(max_dev_from_dft(c, n) < 1e-9);
    CHECK(c.ancilla_high_water() == 0);
  }
}

TEST_CASE("iqft inverts qft") {
  for (auto variant : {QftConfig::standard(), QftConfig::fast(2)}) {
    QftBuilder qb(variant);
    Circuit c;
    auto q = c.add_register("q", 5, "input").qubits();
    qb.emit_qft(c, q);
    qb.emit_iqft(c, q);
    Simulator sim;
    auto t = action_table(c, sim);
    for (std::uint64_t i = 0; i < t.output.size(); ++i) {
      CHECK(t.output[i] == i);
      CHECK(std::abs(t.phase[i] - cdouble(1, 0)) < 1e-9);
    }
  }
}

TEST_CASE("pruning drops only tiny rotations") {
  QftConfig cfg;
  cfg.prune = true;
  cfg.pruning_threshold = 0.02;  // keep |angle| >= 2 pi / 50
  QftBuilder qb(cfg);
  auto c = qb.qft_circuit(8);
  QftBuilder full;
  auto cf = full.qft_circuit(8);
  CHECK(c.census().crphi < cf.census().crphi);
  // still close to the exact transform for mild pruning
  CHECK(max_dev_from_dft(c, 8) < 8 * 8 * 0.02);
}

TEST_CASE("phase gradient state is an adder eigenstate") {
  const std::size_t m = 8;
  Circuit c;
  auto g = c.add_register("grad", int(m), "ancilla").qubits();
  phase_gradient_prepare(c, g);
  Simulator sim;
  auto prepared = sim.run(c, 0);

  // 100 pseudo-random rotations; the gradient returns to itself with the
  // accumulated phase sum_i 2 pi a_i / 2^m.
  std::mt19937_64 rng(99);
  Circuit r;
  auto gr = r.add_register("grad", int(m), "ancilla").qubits();
  phase_gradient_prepare(r, gr);
  double expected_phase = 0;
  for (int it = 0; it < 100; ++it) {
    double angle = std::uniform_real_distribution<double>(-6.0, 6.0)(rng);
    std::int64_t a = phase_gradient_increment(angle, m);
    expected_phase += 2.0 * std::numbers::pi * double(a) / double(1 << m);
    phase_gradient_rotate(r, gr, angle);
  }
  auto sv = sim.run(r, 0);
  cdouble overlap = prepared.inner(sv);
  CHECK(std::norm(overlap) > 1.0 - 1e-9);
  double got = std::arg(overlap);
  CHECK(std::abs(std::remainder(got - expected_phase, 2.0 * std::numbers::pi)) < 1e-9);
}

TEST_CASE("controlled gradient rotation: angle pi at m=8 flips the branch") {
  const std::size_t m = 8;
  Circuit c;
  auto ctrl = c.add_register("ctrl", 1, "input").qubits();
  auto g = c.add_register("grad", int(m), "ancilla").qubits();
  phase_gradient_prepare(c, g);
  CHECK(phase_gradient_increment(std::numbers::pi, m) == 128);
  phase_gradient_rotate(c, g, std::numbers::pi, {ctrl[0]});
  // overlap of each control branch with |ctrl>|Phi>: the controlled branch
  // picks up exactly the phase e^{2 pi i 128/256} = -1
  Circuit prep;
  auto gp = prep.add_register("grad", int(m), "ancilla").qubits();
  phase_gradient_prepare(prep, gp);
  Simulator sim;
  auto with_ctrl1 = sim.run(c, 1);
  auto with_ctrl0 = sim.run(c, 0);
  auto base = sim.run(prep, 0);
  cdouble o1 = 0, o0 = 0;
  for (std::uint64_t w = 0; w < (1ull << m); ++w) {
    o0 += std::conj(base.amp(w)) * with_ctrl0.amp(w << 1);
    o1 += std::conj(base.amp(w)) * with_ctrl1.amp((w << 1) | 1);
  }
  CHECK(std::abs(o0 - cdouble(1, 0)) < 1e-9);
  CHECK(std::abs(o1 - cdouble(-1, 0)) < 1e-9);

  // angle 0 is the identity
  Circuit id;
  auto gi = id.add_register("grad", int(m), "ancilla").qubits();
  phase_gradient_rotate(id, gi, 0.0);
  CHECK(id.gates().empty());
}
