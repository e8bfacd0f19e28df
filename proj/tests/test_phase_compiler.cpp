#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qmf/phase_compiler.hpp"
#include "qmf/simulator.hpp"
#include "test_util.hpp"

using namespace qmf;
using qmf::testutil::check_diagonal;
using qmf::testutil::span_value;

namespace {

CompileConfig zero_cfg(std::size_t n_base = 2, KPolicy pol = KPolicy::auto_search()) {
  CompileConfig cfg;
  cfg.k_policy = pol;
  cfg.n_base_double = n_base;
  cfg.n_base_triple = n_base;
  cfg.overflow_mode = OverflowMode::ZeroAncilla;
  return cfg;
}

CompileConfig stored_cfg(std::size_t n_base = 2, KPolicy pol = KPolicy::auto_search()) {
  CompileConfig cfg = zero_cfg(n_base, pol);
  cfg.overflow_mode = OverflowMode::StoredAncilla;
  return cfg;
}

double pp_deviation(Circuit& c, double phi) {
  auto x = c.find_register("x")->qubits();
  auto z = c.find_register("z")->qubits();
  return check_diagonal(c, [&](std::uint64_t b) {
    return phi * double(span_value(b, x)) * double(span_value(b, z));
  });
}

double pt_deviation(Circuit& c, double phi) {
  auto x = c.find_register("x")->qubits();
  auto y = c.find_register("y")->qubits();
  auto z = c.find_register("z")->qubits();
  return check_diagonal(c, [&](std::uint64_t b) {
    return phi * double(span_value(b, x)) * double(span_value(b, y)) *
           double(span_value(b, z));
  });
}

}  // namespace

TEST_CASE("schoolbook base cases") {
  const double theta = 0.37;
  PhaseCompiler pc(zero_cfg(2, KPolicy::schoolbook_only()));
  auto c = pc.compile_phase_product(2, 2, theta);
  REQUIRE(c.census().crphi == 4);
  CHECK(c.census().total() == 4);
  // angles are theta * 2^{i+j}
  std::vector<double> angles;
  for (const auto& g : c.gates()) angles.push_back(g.angle);
  std::sort(angles.begin(), angles.end());
  CHECK(angles[0] == doctest::Approx(theta));
  CHECK(angles[1] == doctest::Approx(theta * 2));
  CHECK(angles[2] == doctest::Approx(theta * 2));
  CHECK(angles[3] == doctest::Approx(theta * 4));

  auto c33 = pc.compile_phase_product(3, 3, theta);
  CHECK(c33.census().crphi == 9);

  auto c11 = pc.compile_phase_product(1, 1, std::numbers::pi / 4);
  REQUIRE(c11.census().crphi == 1);
  CHECK(c11.gates()[0].angle == doctest::Approx(std::numbers::pi / 4));

  auto t222 = pc.compile_phase_triple(2, 2, 2, theta);
  CHECK(t222.census().ccrphi == 8);
  CHECK(t222.census().total() == 8);

  CHECK(pc.compile_phase_product(4, 4, 0.0).gates().empty());
  CHECK_THROWS(pc.compile_phase_product(0, 3, theta));
}

TEST_CASE("zero-ancilla recursion is exact (double)") {
  const double phi = 0.9125;
  for (auto pol : {KPolicy::fixed(2), KPolicy::fixed(3), KPolicy::auto_search()}) {
    for (std::size_t w = 3; w <= 6; ++w) {
      PhaseCompiler pc(zero_cfg(2, pol));
      auto c = pc.compile_phase_product(w, w, phi);
      CAPTURE(w);
      CAPTURE(int(pol.mode));
      CHECK(c.ancilla_high_water() == 0);
      CHECK(c.qubit_count() == int(2 * w));
      CHECK(pp_deviation(c, phi) < 1e-9);
    }
  }
}

TEST_CASE("zero-ancilla recursion is exact (triple)") {
  const double phi = 0.143;
  for (std::size_t w = 3; w <= 4; ++w) {
    PhaseCompiler pc(zero_cfg(2, KPolicy::fixed(3)));
    auto c = pc.compile_phase_triple(w, w, w, phi);
    CAPTURE(w);
    CHECK(c.ancilla_high_water() == 0);
    CHECK(pt_deviation(c, phi) < 1e-9);
  }
}

TEST_CASE("stored-ancilla recursion is exact and frees its qubits") {
  const double phi = 0.777;
  for (auto pol : {KPolicy::fixed(2), KPolicy::auto_search()}) {
    for (std::size_t w = 4; w <= 6; ++w) {
      PhaseCompiler pc(stored_cfg(2, pol));
      auto c = pc.compile_phase_product(w, w, phi);
      CAPTURE(w);
      if (pol.mode == KPolicy::Mode::Fixed) CHECK(c.ancilla_high_water() > 0);
      CHECK(c.ancilla_in_flight() == 0);
      CHECK(pp_deviation(c, phi) < 1e-9);
    }
  }
  // triple with the standard policy hits the shift-relabel path (point -2)
  PhaseCompiler pc(stored_cfg(2, KPolicy::fixed(3)));
  auto c = pc.compile_phase_triple(3, 3, 3, phi);
  CHECK(pt_deviation(c, phi) < 1e-9);
}

TEST_CASE("unequal widths chunk correctly") {
  const double phi = 0.21;
  for (auto cfg : {zero_cfg(2), stored_cfg(2)}) {
    PhaseCompiler pc(cfg);
    auto c = pc.compile_phase_product(3, 7, phi);
    CHECK(pp_deviation(c, phi) < 1e-9);
    auto c2 = pc.compile_phase_product(5, 2, phi);
    CHECK(pp_deviation(c2, phi) < 1e-9);
  }
}

TEST_CASE("pair-sum product uses one borrowed dirty bit and stays exact") {
  // phi (x0 + x1)(z0 + z1) over four m-bit registers, zero ancillas: the
  // carry handling borrows an input bit as the adder's incoming carry, and
  // the compensation rotations keep every basis state exact -- including
  // both values of the borrowed bit.
  const double phi = 1.234;
  for (std::size_t m : {2u, 3u, 4u}) {
    Circuit c;
    auto x0 = c.add_register("x0", int(m), "input").qubits();
    auto x1 = c.add_register("x1", int(m), "input").qubits();
    auto z0 = c.add_register("z0", int(m), "input").qubits();
    auto z1 = c.add_register("z1", int(m), "input").qubits();
    PhaseCompiler pc(zero_cfg(8));
    SideSpec xs{{x0, Rational(1)}, {x1, Rational(1)}};
    SideSpec zs{{z0, Rational(1)}, {z1, Rational(1)}};
    pc.emit_phase_product_general(c, xs, zs, PhaseAngle{phi, Rational(1)});
    CHECK(c.ancilla_high_water() == 0);
    double dev = check_diagonal(c, [&](std::uint64_t b) {
      return phi * double(span_value(b, x0) + span_value(b, x1)) *
             double(span_value(b, z0) + span_value(b, z1));
    });
    CAPTURE(m);
    CHECK(dev < 1e-9);
  }
}

TEST_CASE("stored pair-sum allocates exactly one overflow qubit") {
  const double phi = 0.58;
  const std::size_t m = 3;
  Circuit c;
  auto x0 = c.add_register("x0", int(m), "input").qubits();
  auto x1 = c.add_register("x1", int(m), "input").qubits();
  auto z0 = c.add_register("z0", int(m), "input").qubits();
  auto z1 = c.add_register("z1", int(m), "input").qubits();
  PhaseCompiler pc(stored_cfg(8));
  SideSpec xs{{x0, Rational(1)}, {x1, Rational(1)}};
  SideSpec zs{{z0, Rational(1)}, {z1, Rational(1)}};
  pc.emit_phase_product_general(c, xs, zs, PhaseAngle{phi, Rational(1)});
  // per side: one overflow extension qubit plus adder workspace
  const auto* ovf = c.find_register("ovf");
  REQUIRE(ovf != nullptr);
  CHECK(ovf->size == 1);
  double dev = check_diagonal(c, [&](std::uint64_t b) {
    return phi * double(span_value(b, x0) + span_value(b, x1)) *
           double(span_value(b, z0) + span_value(b, z1));
  });
  CHECK(dev < 1e-9);
}

TEST_CASE("semi-digital base case") {
  CompileConfig cfg = zero_cfg(4, KPolicy::schoolbook_only());
  cfg.base_mode = BaseMode::SemiDigital;
  PhaseCompiler pc(cfg);
  const double phi = 0.66;
  auto c = pc.compile_phase_triple(2, 2, 2, phi);
  CHECK(c.census().ccrphi == 0);
  CHECK(c.census().crphi <= 8);
  CHECK(c.census().toffoli > 0);

  auto c3 = pc.compile_phase_triple(3, 3, 3, phi);
  CHECK(pt_deviation(c3, phi) < 1e-9);

  auto c0 = pc.compile_phase_triple(3, 3, 3, 0.0);
  CHECK(c0.gates().empty());
}

TEST_CASE("estimator census equals compiled census") {
  const double phi = 0.31;
  for (auto base : {BaseMode::Schoolbook, BaseMode::SemiDigital}) {
    for (auto mode : {OverflowMode::ZeroAncilla, OverflowMode::StoredAncilla}) {
      for (auto pol : {KPolicy::auto_search(), KPolicy::fixed(2), KPolicy::fixed(3)}) {
        CompileConfig cfg;
        cfg.k_policy = pol;
        cfg.n_base_double = 4;
        cfg.n_base_triple = 3;
        cfg.overflow_mode = mode;
        cfg.base_mode = base;
        PhaseCompiler pc(cfg);
        for (std::size_t w : {3u, 5u, 9u, 16u}) {
          auto c = pc.compile_phase_product(w, w, phi);
          auto nc = pc.count_phase_product(w, w);
          CAPTURE(int(base));
          CAPTURE(int(mode));
          CAPTURE(int(pol.mode));
          CAPTURE(w);
          CHECK(c.census() == nc.census);
          CHECK(c.ancilla_high_water() == nc.ancilla_high);
        }
        for (std::size_t w : {3u, 6u}) {
          auto c = pc.compile_phase_triple(w, w, w, phi);
          auto nc = pc.count_phase_triple(w, w, w);
          CHECK(c.census() == nc.census);
          CHECK(c.ancilla_high_water() == nc.ancilla_high);
        }
      }
    }
  }
}

TEST_CASE("gate-count recurrence for fixed k") {
  // T(n) = (2k-1) T(n/k) + O(n): successive ratios of rotation counts
  // should approach 2k-1 from above.
  PhaseCompiler pc(zero_cfg(8, KPolicy::fixed(2)));
  auto c16 = pc.count_phase_product(16, 16);
  auto c32 = pc.count_phase_product(32, 32);
  auto c64 = pc.count_phase_product(64, 64);
  double r1 = double(c32.census.crphi) / double(c16.census.crphi);
  double r2 = double(c64.census.crphi) / double(c32.census.crphi);
  CHECK(r1 > 2.9);
  CHECK(r2 > 2.9);
  CHECK(r2 < r1 + 0.3);
}
