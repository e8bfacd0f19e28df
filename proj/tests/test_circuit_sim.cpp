#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qmf/circuit.hpp"
#include "qmf/simulator.hpp"

using namespace qmf;

TEST_CASE("single gates") {
  Simulator sim;
  {
    Circuit c;
    c.add_register("q", 1, "input");
    emit_x(c, 0);
    auto sv = sim.run(c, 0);
    CHECK(std::abs(sv.amp(1) - cdouble(1, 0)) < 1e-12);
  }
  {
    Circuit c;
    c.add_register("q", 1, "input");
    emit_h(c, 0);
    auto sv = sim.run(c, 0);
    CHECK(std::abs(sv.amp(0) - cdouble(1 / std::sqrt(2.0), 0)) < 1e-12);
    CHECK(std::abs(sv.amp(1) - cdouble(1 / std::sqrt(2.0), 0)) < 1e-12);
  }
  {
    Circuit c;
    c.add_register("q", 2, "input");
    emit_crphi(c, 0, 1, std::numbers::pi);
    auto sv = sim.run(c, 3);
    CHECK(std::abs(sv.amp(3) - cdouble(-1, 0)) < 1e-12);
  }
}

TEST_CASE("norm preservation and unitarity spot check") {
  std::mt19937_64 rng(3);
  Circuit c;
  c.add_register("q", 4, "input");
  for (int it = 0; it < 60; ++it) {
    int a = int(rng() % 4), b = int(rng() % 4), d = int(rng() % 4);
    switch (rng() % 5) {
      case 0: emit_h(c, a); break;
      case 1: emit_x(c, a); break;
      case 2: if (a != b) emit_cnot(c, a, b); break;
      case 3: if (a != b) emit_crphi(c, a, b, 0.3 * double(it)); break;
      default:
        if (a != b && b != d && a != d) emit_toffoli(c, a, b, d);
        break;
    }
  }
  Simulator sim;
  auto s1 = sim.run(c, 5);
  auto s2 = sim.run(c, 9);
  CHECK(std::abs(s1.norm() - 1.0) < 1e-12);
  // <psi1|psi2> invariant: inputs orthogonal, outputs must stay orthogonal
  CHECK(std::abs(s1.inner(s2)) < 1e-10);
}

TEST_CASE("action table extraction") {
  Circuit c;
  c.add_register("q", 2, "input");
  Simulator sim;
  auto t = action_table(c, sim);
  for (std::uint64_t x = 0; x < 4; ++x) {
    CHECK(t.output[x] == x);
    CHECK(std::abs(t.phase[x] - cdouble(1, 0)) < 1e-12);
  }

  Circuit p;
  p.add_register("q", 2, "input");
  emit_crphi(p, 0, 1, 0.7);
  auto tp = action_table(p, sim);
  CHECK(tp.output[3] == 3);
  CHECK(std::abs(tp.phase[3] - std::polar(1.0, 0.7)) < 1e-12);

  Circuit h;
  h.add_register("q", 1, "input");
  emit_h(h, 0);
  CHECK_THROWS_AS(action_table(h, sim), NonPermutationError);
}

TEST_CASE("verify_against and fidelity") {
  Circuit c;
  c.add_register("q", 3, "input");
  Simulator sim;
  double dev = verify_against(c, sim, [](std::uint64_t x) {
    return std::make_pair(x, cdouble(1, 0));
  });
  CHECK(dev == 0.0);

  StateVector sv(3, 5);
  CHECK(fidelity(sv, 5) == doctest::Approx(1.0));
  CHECK(fidelity(sv, 2) == doctest::Approx(0.0));
}

TEST_CASE("measurement is deterministic under a seed") {
  SimConfig cfg;
  cfg.seed = 1234;
  Simulator sim(cfg);
  Circuit c;
  c.add_register("q", 1, "input");
  emit_h(c, 0);
  Gate m{GateKind::Measure, 0};
  m.classical_bit = 0;
  c.on_gate(m);
  auto a = sim.run(c, 0);
  auto b = sim.run(c, 0);
  for (std::uint64_t i = 0; i < 2; ++i) CHECK(std::abs(a.amp(i) - b.amp(i)) < 1e-15);
}

TEST_CASE("classically controlled gate") {
  Circuit c;
  c.add_register("q", 2, "input");
  Gate m{GateKind::Measure, 0};
  m.classical_bit = 0;
  c.on_gate(m);
  Gate cx{GateKind::X, 1};
  cx.cond_bit = 0;
  c.on_gate(cx);
  Simulator sim;
  // input |01>: measurement reads 1, so the X fires
  auto sv = sim.run(c, 1);
  CHECK(fidelity(sv, 3) == doctest::Approx(1.0));
  // input |00>: measurement reads 0, X suppressed
  auto sv0 = sim.run(c, 0);
  CHECK(fidelity(sv0, 0) == doctest::Approx(1.0));
}

TEST_CASE("qubit ceiling") {
  SimConfig cfg;
  cfg.qubit_limit = 4;
  Simulator sim(cfg);
  Circuit c;
  c.add_register("q", 5, "input");
  CHECK_THROWS(sim.run(c, 0));
}

TEST_CASE("ancilla bookkeeping") {
  Circuit c;
  c.add_register("q", 2, "input");
  int a = c.alloc_ancilla(3, "scratch");
  CHECK(c.ancilla_in_flight() == 3);
  int b = c.alloc_ancilla(1, "bit");
  CHECK(c.ancilla_high_water() == 4);
  c.release_ancilla(a, 3);
  c.release_ancilla(b, 1);
  CHECK(c.ancilla_in_flight() == 0);
  CHECK(c.ancilla_high_water() == 4);
  // released indices are reused on shape match
  int a2 = c.alloc_ancilla(3, "scratch2");
  CHECK(a2 == a);
  CHECK(c.qubit_count() == 6);
}

#include "qmf/phase_compiler.hpp"

TEST_CASE("verify_against flags a corrupted rotation") {
  PhaseCompiler pc;
  const double phi = 0.45;
  auto c = pc.compile_phase_product(4, 4, phi);
  Simulator sim;
  auto spec = [&](std::uint64_t b) {
    std::uint64_t x = b & 15, z = b >> 4;
    return std::make_pair(b, std::polar(1.0, phi * double(x) * double(z)));
  };
  CHECK(verify_against(c, sim, spec) < 1e-9);

  // corrupt one angle; the deviation must be macroscopic
  Circuit bad = c;
  for (auto& g : bad.mutable_gates())
    if (g.kind == GateKind::CRphi) {
      g.angle += 0.25;
      break;
    }
  CHECK(verify_against(bad, sim, spec) > 1e-3);
}
