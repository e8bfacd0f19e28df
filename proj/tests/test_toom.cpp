#include <random>

#include "doctest.h"
#include "qmf/toom.hpp"

using namespace qmf;

namespace {
EvalPoint F(std::int64_t w) { return EvalPoint::finite(w); }
EvalPoint UF(std::int64_t c) { return EvalPoint::unit_fraction(c); }
EvalPoint INF() { return EvalPoint::infinity(); }
}  // namespace

TEST_CASE("evaluation point policy order") {
  auto p1 = select_eval_points(1, ToomMode::Double);
  REQUIRE(p1.size() == 1);
  CHECK(p1[0] == F(0));

  auto p3 = select_eval_points(3, ToomMode::Double);
  CHECK(p3 == std::vector<EvalPoint>{F(0), INF(), F(-1)});

  auto p7 = select_eval_points(7, ToomMode::Double);
  CHECK(p7 == std::vector<EvalPoint>{F(0), INF(), F(-1), F(1), UF(-2), UF(2), F(-2)});

  auto p12 = select_eval_points(12, ToomMode::Double);
  CHECK(p12 == std::vector<EvalPoint>{F(0), INF(), F(-1), F(1), UF(-2), UF(2), F(-2), F(2),
                                      UF(-4), UF(4), F(-4), F(4)});

  // Unit-fraction-only policy swaps the integer points for deeper fractions.
  auto z7 = select_eval_points(7, ToomMode::Double, PointPolicy::UnitFractionOnly);
  CHECK(z7 == std::vector<EvalPoint>{F(0), INF(), F(-1), F(1), UF(-2), UF(2), UF(-4)});

  for (std::size_t q = 1; q <= 16; ++q) {
    check_points_distinct(select_eval_points(q, ToomMode::Double));
    check_points_distinct(select_eval_points(q, ToomMode::Double, PointPolicy::UnitFractionOnly));
  }
}

TEST_CASE("evaluation matrix rows") {
  auto m2 = eval_matrix({F(0), F(1), INF()}, 2);
  CHECK(m2 == IntMatrix{{BigInt(0), BigInt(1)}, {BigInt(1), BigInt(1)}, {BigInt(1), BigInt(0)}});

  auto m1 = eval_matrix({F(0)}, 1);
  CHECK(m1 == IntMatrix{{BigInt(1)}});

  auto m3 = eval_matrix({F(0), F(1), INF()}, 3);
  CHECK(m3 == IntMatrix{{BigInt(0), BigInt(0), BigInt(1)},
                        {BigInt(1), BigInt(1), BigInt(1)},
                        {BigInt(1), BigInt(0), BigInt(0)}});

  // Unit fraction 1/c rows are the scaled form (1, c, ..., c^{w-1}).
  auto mu = eval_matrix({UF(-2)}, 3);
  CHECK(mu == IntMatrix{{BigInt(1), BigInt(-2), BigInt(4)}});
}

TEST_CASE("exact inversion") {
  RatMatrix id3(3, std::vector<Rational>(3));
  for (std::size_t i = 0; i < 3; ++i) id3[i][i] = Rational(1);
  CHECK(invert_exact(id3) == id3);

  // A'' for [0, 1, inf] maps (t0, t1, tinf) to coefficients (p2, p1, p0).
  auto inv = invert_exact(to_rational(eval_matrix({F(0), F(1), INF()}, 3)));
  RatMatrix expect{{Rational(0), Rational(0), Rational(1)},
                   {Rational(-1), Rational(1), Rational(-1)},
                   {Rational(1), Rational(0), Rational(0)}};
  CHECK(inv == expect);

  RatMatrix sing{{Rational(1), Rational(2)}, {Rational(1), Rational(2)}};
  CHECK_THROWS_AS(invert_exact(sing), SingularMatrixError);
}

TEST_CASE("plan assembly") {
  auto p = make_plan(8, 2, ToomMode::Double);
  CHECK(p.q == 3);
  CHECK(p.piece_widths == std::vector<std::size_t>{4, 4});

  auto p2 = make_plan(10, 3, ToomMode::Double);
  CHECK(p2.q == 5);
  CHECK(p2.piece_widths == std::vector<std::size_t>{3, 3, 4});

  auto p3 = make_plan(8, 3, ToomMode::Triple);
  CHECK(p3.q == 7);

  CHECK_THROWS(make_plan(8, 1, ToomMode::Double));
  CHECK_THROWS(make_plan(2, 3, ToomMode::Double));
}

TEST_CASE("A'' inverse is exact for every policy plan") {
  for (auto mode : {ToomMode::Double, ToomMode::Triple}) {
    for (std::size_t k = 2; k <= 8; ++k) {
      auto plan = make_plan(64, k, mode);
      auto a2 = to_rational(eval_matrix(plan.points, plan.q));
      for (std::size_t i = 0; i < plan.q; ++i)
        for (std::size_t j = 0; j < plan.q; ++j) {
          Rational acc;
          for (std::size_t l = 0; l < plan.q; ++l) acc += a2[i][l] * plan.a_doubleprime_inv[l][j];
          CHECK(acc == (i == j ? Rational(1) : Rational(0)));
        }
    }
  }
}

TEST_CASE("phi coefficients: Karatsuba instance") {
  auto plan = make_plan_with_points(8, 2, ToomMode::Double, {F(0), F(1), INF()});
  auto phi = phi_coefficients(plan, Rational(1));
  REQUIRE(phi.entries.size() == 3);
  CHECK(phi.entries[0] == Rational(-15));
  CHECK(phi.entries[1] == Rational(16));
  CHECK(phi.entries[2] == Rational(240));

  auto zero = phi_coefficients(plan, Rational(0));
  for (const auto& e : zero.entries) CHECK(e.is_zero());

  CHECK(phase_sum_identity(plan, Rational(1), {BigInt(1), BigInt(1)}) == Rational(1));
}

TEST_CASE("multiplication oracles") {
  auto plan = make_plan(4, 2, ToomMode::Double);
  CHECK(toom_multiply_oracle(BigInt(5), BigInt(3), plan) == BigInt(15));
  CHECK(toom_multiply_oracle(BigInt(0), BigInt(13), plan) == BigInt(0));

  std::mt19937_64 rng(7);
  for (std::size_t k = 2; k <= 8; ++k) {
    auto plank = make_plan(512, k, ToomMode::Double);
    for (int it = 0; it < 6; ++it) {
      BigInt x = BigInt::random_bits(rng, 512), y = BigInt::random_bits(rng, 512);
      CHECK(toom_multiply_oracle(x, y, plank) == x * y);
    }
  }

  auto t3 = make_plan(4, 3, ToomMode::Triple);
  CHECK(toom_triple_oracle(BigInt(1), BigInt(1), BigInt(1), t3) == BigInt(1));
  CHECK(toom_triple_oracle(BigInt(3), BigInt(5), BigInt(7), t3) == BigInt(105));

  auto t4 = make_plan(64, 4, ToomMode::Triple);
  for (int it = 0; it < 25; ++it) {
    BigInt x = BigInt::random_bits(rng, 64), y = BigInt::random_bits(rng, 64),
           z = BigInt::random_bits(rng, 64);
    CHECK(toom_triple_oracle(x, y, z, t4) == x * y * z);
  }
}

TEST_CASE("phase sum identity") {
  auto plan = make_plan(4, 2, ToomMode::Double);
  CHECK(phase_sum_identity(plan, Rational(1, 7), {BigInt(5), BigInt(3)}) == Rational(15, 7));
  CHECK(phase_sum_identity(plan, Rational(1), {BigInt(0), BigInt(9)}) == Rational(0));

  auto t3 = make_plan(4, 3, ToomMode::Triple);
  CHECK(phase_sum_identity(t3, Rational(1), {BigInt(2), BigInt(3), BigInt(4)}) == Rational(24));

  std::mt19937_64 rng(42);
  for (auto mode : {ToomMode::Double, ToomMode::Triple}) {
    for (std::size_t k = 2; k <= 6; ++k) {
      auto p = make_plan(96, k, mode);
      auto raw = phi_coefficients(p);
      std::size_t arity = mode == ToomMode::Double ? 2 : 3;
      for (int it = 0; it < 20; ++it) {
        std::vector<BigInt> in;
        BigInt prod(1);
        for (std::size_t s = 0; s < arity; ++s) {
          in.push_back(BigInt::random_bits(rng, 96));
          prod *= in.back();
        }
        CHECK(phase_sum_identity(p, raw, Rational(3, 5), in) ==
              Rational(prod * BigInt(3), BigInt(5)));
      }
    }
  }
}

TEST_CASE("unit fraction row scaling consistency") {
  // The scaled row for 1/c weights piece j by c^{k-1-j}, i.e. the row dotted
  // with the digits equals c^{k-1} times the polynomial value at 1/c.
  auto plan = make_plan(12, 3, ToomMode::Double);  // includes -1/2
  std::mt19937_64 rng(5);
  for (int it = 0; it < 10; ++it) {
    BigInt x = BigInt::random_bits(rng, 12);
    auto pieces = split_pieces(x, plan);
    for (std::size_t l = 0; l < plan.q; ++l) {
      const auto& pt = plan.points[l];
      if (pt.kind != EvalPoint::Kind::UnitFraction || pt.is_infinity()) continue;
      Rational inv_pt(BigInt(1), BigInt(pt.value));
      Rational poly;
      for (std::size_t j = 0; j < plan.k; ++j) {
        Rational term(pieces[j]);
        for (std::size_t e = 0; e < j; ++e) term *= inv_pt;
        poly += term;
      }
      Rational scale(BigInt(pt.value).pow(static_cast<unsigned>(plan.k - 1)));
      CHECK(Rational(plan.evaluate(l, pieces)) == poly * scale);
    }
  }
}

TEST_CASE("piece reassembly") {
  std::mt19937_64 rng(11);
  for (std::size_t k = 2; k <= 6; ++k) {
    auto plan = make_plan(50, k, ToomMode::Double);
    for (int it = 0; it < 10; ++it) {
      BigInt x = BigInt::random_bits(rng, 50);
      auto pieces = split_pieces(x, plan);
      BigInt back;
      std::size_t off = 0;
      for (std::size_t i = 0; i < plan.k; ++i) {
        back += pieces[i] << off;
        off += plan.piece_widths[i];
      }
      CHECK(back == x);
    }
  }
}
