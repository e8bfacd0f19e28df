#pragma once

// In-place addition schedules for forming the point evaluations (A'x)_l
// over the input pieces, overwriting the most significant piece. Negated
// point pairs share the partial sum of one parity class, so a +/-w pair
// costs 2k-1 additions total and an unpaired point costs 2k-2. Schedules
// are symbolic objects; the gate emitters consume their steps.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qmf/linexpr.hpp"
#include "qmf/toom.hpp"

namespace qmf {

struct AdderStep {
  enum class Kind { Add, Negate, Shift };
  Kind kind = Kind::Add;
  std::size_t src = 0;       // piece index (Add)
  std::size_t dst = 0;       // piece index (all kinds)
  std::size_t shift = 0;     // log2 of the power-of-two coefficient
  int sign = 1;              // +1 add, -1 subtract (Add only)
};

// One evaluation produced by the schedule: after `steps_done` steps, the
// register of piece `target` holds `proportionality` * (A'x)_{point_index}.
struct ScheduleProduct {
  std::size_t steps_done = 0;
  std::size_t point_index = 0;
  std::size_t target = 0;
  int proportionality = 1;  // +1 or -1
};

struct AdderSchedule {
  std::size_t k = 0;
  std::vector<AdderStep> steps;
  std::vector<ScheduleProduct> products;
  // Pairs of point indices (negatives of each other) that shared work.
  std::vector<std::pair<std::size_t, std::size_t>> pairing;

  std::size_t addition_count() const {
    std::size_t c = 0;
    for (const auto& s : steps)
      if (s.kind == AdderStep::Kind::Add) ++c;
    return c;
  }
};

namespace detail {

// Per-piece exponent of the point's coefficient: finite w contributes w^j
// to piece j, a unit fraction 1/c contributes c^{k-1-j}.
inline unsigned coeff_exponent(const EvalPoint& p, std::size_t k, std::size_t piece) {
  return static_cast<unsigned>(p.kind == EvalPoint::Kind::Finite ? piece : k - 1 - piece);
}

inline std::int64_t point_base(const EvalPoint& p) { return p.value; }

inline std::size_t log2_abs(std::int64_t v) {
  std::uint64_t a = v < 0 ? static_cast<std::uint64_t>(-v) : static_cast<std::uint64_t>(v);
  std::size_t l = 0;
  while (a > 1) {
    a >>= 1;
    ++l;
  }
  return l;
}

}  // namespace detail

// Builds the paired schedule for a plan whose points follow the policy
// layout: 0 and infinity first (cost-free), then sign pairs, then possibly
// one unpaired widow. Point bases must be +/- a power of two.
//
// pair_coeff_limit_bits caps how large a pair's shared partial sum may
// grow before the pair is built as two independent points instead: the
// pairing saves 2k-3 additions but parks the partial sum (plus overflow
// room) in a register for the span of both recursive calls.
inline AdderSchedule schedule_linear_combinations(const ToomPlan& plan,
                                                  std::size_t pair_coeff_limit_bits = ~0ull) {
  const std::size_t k = plan.k;
  AdderSchedule sched;
  sched.k = k;

  auto emit_add = [&](std::size_t src, std::size_t dst, std::size_t shift, int sign) {
    sched.steps.push_back({AdderStep::Kind::Add, src, dst, shift, sign});
  };
  auto emit_shift = [&](std::size_t dst, std::size_t shift) {
    if (shift) sched.steps.push_back({AdderStep::Kind::Shift, 0, dst, shift, 1});
  };
  auto emit_negate = [&](std::size_t dst) {
    sched.steps.push_back({AdderStep::Kind::Negate, 0, dst, 0, 1});
  };
  auto mark = [&](std::size_t point, std::size_t target, int prop) {
    sched.products.push_back({sched.steps.size(), point, target, prop});
  };

  const std::size_t top = k - 1;

  // Group points: direct reads (0, inf), +/- pairs, unpaired leftovers.
  std::vector<bool> done(plan.q, false);
  for (std::size_t l = 0; l < plan.q; ++l) {
    const EvalPoint& p = plan.points[l];
    if (p.kind == EvalPoint::Kind::Finite && p.value == 0) {
      mark(l, 0, 1);
      done[l] = true;
    } else if (p.is_infinity()) {
      mark(l, top, 1);
      done[l] = true;
    }
  }

  // Emits the in-place build of the evaluation whose piece-j coefficient is
  // base^{e(j)}. Reused for single points (pair_with empty) and sign pairs.
  auto build = [&](std::size_t l, std::optional<std::size_t> pair_l) {
    const EvalPoint& p = plan.points[l];
    std::int64_t base = detail::point_base(p);
    std::size_t logb = detail::log2_abs(base);
    bool base_neg = base < 0;
    auto term_sign = [&](std::size_t piece) {
      return (base_neg && (detail::coeff_exponent(p, k, piece) & 1u)) ? -1 : 1;
    };
    auto term_shift = [&](std::size_t piece) {
      return detail::coeff_exponent(p, k, piece) * logb;
    };

    auto emit_unshift = [&](std::size_t dst, std::size_t shift) {
      if (shift) sched.steps.push_back({AdderStep::Kind::Shift, 0, dst, shift, -1});
    };

    if (!pair_l) {
      // Unpaired: accumulate everything straight into the top piece.
      emit_shift(top, term_shift(top));
      if (term_sign(top) < 0) emit_negate(top);
      for (std::size_t j = 0; j < top; ++j) emit_add(j, top, term_shift(j), term_sign(j));
      mark(l, top, 1);
      // Uncompute; a complement always discharges into the next addition.
      if (term_sign(top) < 0) {
        emit_negate(top);
        for (std::size_t j = 0; j < top; ++j) emit_add(j, top, term_shift(j), term_sign(j));
      } else {
        for (std::size_t j = 0; j < top; ++j) emit_add(j, top, term_shift(j), -term_sign(j));
      }
      emit_unshift(top, term_shift(top));
      return;
    }

    // Sign pair: split pieces by exponent parity. P holds the top piece's
    // class; the other class accumulates into its own highest piece Q*.
    std::size_t pl = *pair_l;
    sched.pairing.push_back({l, pl});
    unsigned top_par = detail::coeff_exponent(p, k, top) & 1u;
    std::vector<std::size_t> P, Q;
    for (std::size_t j = 0; j < k; ++j)
      ((detail::coeff_exponent(p, k, j) & 1u) == top_par ? P : Q).push_back(j);
    // k >= 2 guarantees Q nonempty: exponents j (or k-1-j) cover both parities.
    std::size_t qstar = Q.back();

    // Use |base| for the shared magnitudes; signs are tracked per point.
    auto mag_shift = [&](std::size_t piece) { return term_shift(piece); };

    // V_Q into qstar.
    emit_shift(qstar, mag_shift(qstar));
    for (std::size_t j : Q)
      if (j != qstar) emit_add(j, qstar, mag_shift(j), 1);
    // V_P + V_Q into top.
    emit_shift(top, mag_shift(top));
    for (std::size_t j : P)
      if (j != top) emit_add(j, top, mag_shift(j), 1);
    emit_add(qstar, top, 0, 1);

    // Top now holds sum_j |base|^{e(j)} x_j: the evaluation at +|base|
    // (or +1/|base|). Which of l, pl that is depends on sign(base).
    auto positive_point = [&](std::size_t cand) {
      return detail::point_base(plan.points[cand]) > 0;
    };
    std::size_t pos = positive_point(l) ? l : pl;
    std::size_t neg = pos == l ? pl : l;
    mark(pos, top, 1);

    // Derive the negative partner: T <- 2 V_Q - T, which equals
    // -x(neg) when the top piece's parity class is even, x(neg) otherwise.
    emit_negate(top);
    emit_add(qstar, top, 1, 1);
    int neg_prop = (top_par == 0) ? -1 : 1;
    mark(neg, top, neg_prop);

    // Restore: complement (so the next addition discharges it), add V_Q
    // back, then strip the P addends.
    emit_negate(top);
    emit_add(qstar, top, 0, 1);
    for (std::size_t j : P)
      if (j != top) emit_add(j, top, mag_shift(j), -1);
    emit_unshift(top, mag_shift(top));
    for (std::size_t j : Q)
      if (j != qstar) emit_add(j, qstar, mag_shift(j), -1);
    emit_unshift(qstar, mag_shift(qstar));
  };

  // Pair up remaining points by opposite extended-rational values.
  for (std::size_t l = 0; l < plan.q; ++l) {
    if (done[l]) continue;
    std::optional<std::size_t> partner;
    auto [ln, ld] = plan.points[l].as_extended_rational();
    for (std::size_t j = l + 1; j < plan.q; ++j) {
      if (done[j]) continue;
      auto [jn, jd] = plan.points[j].as_extended_rational();
      if (ln == -jn && ld == jd) {
        partner = j;
        break;
      }
    }
    done[l] = true;
    if (partner) {
      done[*partner] = true;
      BigInt coeff_sum(0);
      for (std::size_t j = 0; j < k; ++j)
        coeff_sum += plan.piece_coefficient(l, j).abs();
      if (coeff_sum.bit_length() > pair_coeff_limit_bits) {
        build(l, std::nullopt);
        build(*partner, std::nullopt);
        continue;
      }
    }
    build(l, partner);
  }
  return sched;
}

// Symbolic execution over the piece symbols. A negative-sign Shift divides
// (used by uncompute); divisions must stay exact in the integers when the
// caller asks for that check.
inline std::vector<LinExpr> symbolic_execute_schedule(const AdderSchedule& sched,
                                                      std::vector<LinExpr> state) {
  for (const auto& s : sched.steps) {
    switch (s.kind) {
      case AdderStep::Kind::Add: {
        Rational f(BigInt::pow2(s.shift));
        if (s.sign < 0) f = -f;
        state[s.dst].add_scaled(state[s.src], f);
        break;
      }
      case AdderStep::Kind::Negate:
        state[s.dst].negate();
        break;
      case AdderStep::Kind::Shift: {
        Rational f = s.sign >= 0 ? Rational(BigInt::pow2(s.shift))
                                 : Rational(BigInt(1), BigInt::pow2(s.shift));
        state[s.dst].scale(f);
        break;
      }
    }
  }
  return state;
}

// Checks restoration and that every product marker holds the marked
// evaluation row (up to the recorded proportionality).
inline bool verify_schedule(const ToomPlan& plan, const AdderSchedule& sched,
                            std::string* diag = nullptr) {
  const std::size_t k = plan.k;
  std::vector<LinExpr> state;
  for (std::size_t i = 0; i < k; ++i) state.push_back(LinExpr::symbol(k, i));

  // Row l as a low-first LinExpr.
  auto row_expr = [&](std::size_t l) {
    LinExpr e(k);
    for (std::size_t j = 0; j < k; ++j) e.coeff(j) = Rational(plan.piece_coefficient(l, j));
    return e;
  };

  // Run incrementally so products can be checked at their positions.
  std::size_t step_pos = 0;
  std::vector<LinExpr> cur = state;
  for (std::size_t prod_idx = 0; prod_idx < sched.products.size(); ++prod_idx) {
    const auto& pr = sched.products[prod_idx];
    while (step_pos < pr.steps_done) {
      AdderSchedule one;
      one.k = k;
      one.steps = {sched.steps[step_pos]};
      cur = symbolic_execute_schedule(one, cur);
      ++step_pos;
    }
    LinExpr expect = row_expr(pr.point_index);
    expect.scale(Rational(pr.proportionality));
    if (cur[pr.target] != expect) {
      if (diag)
        *diag = "product " + std::to_string(prod_idx) + " mismatch: got " +
                cur[pr.target].to_string() + ", expected " + expect.to_string();
      return false;
    }
  }
  while (step_pos < sched.steps.size()) {
    AdderSchedule one;
    one.k = k;
    one.steps = {sched.steps[step_pos]};
    cur = symbolic_execute_schedule(one, cur);
    ++step_pos;
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (cur[i] != state[i]) {
      if (diag) *diag = "piece " + std::to_string(i) + " not restored: " + cur[i].to_string();
      return false;
    }
  }
  return true;
}

}  // namespace qmf
