#include "doctest.h"
#include "qmf/sequences.hpp"

using namespace qmf;

#ifndef QMF_ASSET_DIR
#define QMF_ASSET_DIR "assets"
#endif

namespace {
// Reference trace of the k3_cq sequence: the register each op mutates
// and its expected coefficients afterwards.
struct Row {
  std::size_t reg;
  int c0, c1, c2;
};
const Row k3_cq_trace[] = {
    {1, 0, 1, 1},    // x1 + x2
    {1, 1, 1, 1},    // x0 + x1 + x2
    {1, -1, -1, -1}, // invert
    {1, 0, -1, -1},  // + x0
    {1, 0, -1, 1},   // + 2 x2
    {0, 1, -1, 1},   // reg0 += reg1
    {1, 1, -2, 2},   // + x0 ... reg1 += reg0
    {1, 1, -2, 4},   // + 2 x2
    {1, -1, 2, -4},  // invert
    {1, -1, 2, -2},  // + 2 x2
    {0, 1, 0, 0},    // reg0 <- 2 reg0 + reg1
    {1, 0, 2, -2},   // reg1 += reg0
    {1, 0, 2, 0},    // + 2 x2
    {1, 0, 1, 0},    // divide by two
};
}  // namespace

TEST_CASE("bundled sequences load with the documented shapes") {
  auto seqs = load_sequences(QMF_ASSET_DIR);
  REQUIRE(seqs.size() == 3);
  const Sequence& cq = seqs[0];
  CHECK(cq.name == "k3_cq");
  // 16 operation rows in the source table: 14 ops plus 2 product rows
  CHECK(cq.ops.size() + cq.products.size() == 16);
  CHECK(cq.ops.back().kind == SeqOp::Kind::Divide);
  CHECK(cq.ops.back().divisor == 2);

  const Sequence& qq3 = seqs[1];
  std::vector<EvalPoint> want3{EvalPoint::finite(0),        EvalPoint::infinity(),
                               EvalPoint::finite(1),        EvalPoint::finite(-1),
                               EvalPoint::finite(2),        EvalPoint::finite(-2),
                               EvalPoint::unit_fraction(-2)};
  CHECK(qq3.points == want3);

  const Sequence& qq4 = seqs[2];
  std::vector<EvalPoint> want4{EvalPoint::finite(0),         EvalPoint::infinity(),
                               EvalPoint::finite(1),         EvalPoint::finite(-1),
                               EvalPoint::unit_fraction(2),  EvalPoint::unit_fraction(-2),
                               EvalPoint::finite(2),         EvalPoint::finite(-2),
                               EvalPoint::finite(4),         EvalPoint::finite(-4)};
  CHECK(qq4.points == want4);
}

TEST_CASE("k3_cq trace matches the reference row for row") {
  auto seq = load_sequence_file(std::string(QMF_ASSET_DIR) + "/k3_cq.json");
  auto trace = symbolic_execute(seq);
  REQUIRE(trace.states.size() == 14);
  for (std::size_t i = 0; i < trace.states.size(); ++i) {
    const Row& want = k3_cq_trace[i];
    const LinExpr& got = trace.states[i][want.reg];
    CAPTURE(i);
    CHECK(got.coeff(0) == Rational(want.c0));
    CHECK(got.coeff(1) == Rational(want.c1));
    CHECK(got.coeff(2) == Rational(want.c2));
  }
  // final state fully restored
  for (std::size_t r = 0; r < 3; ++r)
    CHECK(trace.states.back()[r] == LinExpr::symbol(3, r));
}

TEST_CASE("all bundled sequences verify against their point sets") {
  for (const auto& seq : load_sequences(QMF_ASSET_DIR)) {
    auto verdict = verify_sequence(seq, seq.points);
    CAPTURE(seq.name);
    CAPTURE(verdict.diagnostic);
    CHECK(verdict.pass);
  }
}

TEST_CASE("wrong point set fails with a diagnostic") {
  auto seq = load_sequence_file(std::string(QMF_ASSET_DIR) + "/k3_cq.json");
  std::vector<EvalPoint> wrong{EvalPoint::finite(0), EvalPoint::infinity(),
                               EvalPoint::finite(1), EvalPoint::finite(2),
                               EvalPoint::finite(3)};
  auto verdict = verify_sequence(seq, wrong);
  CHECK(!verdict.pass);
  CHECK(!verdict.diagnostic.empty());
}

TEST_CASE("empty sequence leaves the state unchanged") {
  Sequence s;
  s.registers = 2;
  auto trace = symbolic_execute(s);
  CHECK(trace.states.empty());
  CHECK(trace.divisions_exact);
}

TEST_CASE("symbolic execution composes linearly") {
  auto seq = load_sequence_file(std::string(QMF_ASSET_DIR) + "/k3_qq.json");
  auto full = symbolic_execute(seq);
  // executing a prefix then the suffix gives the same states
  Sequence prefix = seq, suffix = seq;
  prefix.ops.resize(7);
  suffix.ops.erase(suffix.ops.begin(), suffix.ops.begin() + 7);
  auto t1 = symbolic_execute(prefix);
  // resume from the prefix state by shifting symbols: compare end states
  CHECK(full.states[6] == t1.states.back());
}
