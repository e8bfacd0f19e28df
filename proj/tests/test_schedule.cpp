#include "doctest.h"
#include "qmf/schedule.hpp"

using namespace qmf;

namespace {
std::size_t expected_additions(const ToomPlan& plan) {
  // 0 and inf are free; sign pairs cost 2k-1, unpaired points 2k-2.
  std::size_t total = 0;
  std::vector<bool> used(plan.q, false);
  for (std::size_t l = 0; l < plan.q; ++l) {
    if (used[l]) continue;
    const auto& p = plan.points[l];
    if ((p.kind == EvalPoint::Kind::Finite && p.value == 0) || p.is_infinity()) continue;
    auto [n, d] = p.as_extended_rational();
    bool paired = false;
    for (std::size_t j = l + 1; j < plan.q; ++j) {
      auto [jn, jd] = plan.points[j].as_extended_rational();
      if (jn == -n && jd == d) {
        paired = true;
        used[j] = true;
        break;
      }
    }
    total += paired ? 2 * plan.k - 1 : 2 * plan.k - 2;
  }
  return total;
}
}  // namespace

TEST_CASE("Karatsuba schedule: unpaired point costs 2k-2") {
  auto plan = make_plan_with_points(8, 2, ToomMode::Double,
                                    {EvalPoint::finite(0), EvalPoint::finite(1),
                                     EvalPoint::infinity()});
  auto sched = schedule_linear_combinations(plan);
  CHECK(sched.addition_count() == 2);
  CHECK(sched.pairing.empty());
  std::string diag;
  CHECK_MESSAGE(verify_schedule(plan, sched, &diag), diag);
}

TEST_CASE("sign pair costs 2k-1") {
  auto plan = make_plan_with_points(8, 2, ToomMode::Double,
                                    {EvalPoint::infinity(), EvalPoint::finite(-1),
                                     EvalPoint::finite(1)});
  auto sched = schedule_linear_combinations(plan);
  CHECK(sched.addition_count() == 3);
  REQUIRE(sched.pairing.size() == 1);
  std::string diag;
  CHECK_MESSAGE(verify_schedule(plan, sched, &diag), diag);
}

TEST_CASE("policy schedules verify and meet the addition bounds") {
  for (auto mode : {ToomMode::Double, ToomMode::Triple}) {
    for (std::size_t k = 2; k <= 6; ++k) {
      for (auto policy : {PointPolicy::Standard, PointPolicy::UnitFractionOnly}) {
        auto plan = make_plan(8 * k, k, mode, policy);
        auto sched = schedule_linear_combinations(plan);
        CAPTURE(k);
        CAPTURE(int(mode));
        CAPTURE(int(policy));
        CHECK(sched.addition_count() == expected_additions(plan));
        std::string diag;
        CHECK_MESSAGE(verify_schedule(plan, sched, &diag), diag);
        // every point is produced exactly once
        std::vector<int> seen(plan.q, 0);
        for (const auto& pr : sched.products) seen[pr.point_index]++;
        for (std::size_t l = 0; l < plan.q; ++l) CHECK(seen[l] == 1);
      }
    }
  }
}

TEST_CASE("symbolic executor is linear") {
  auto plan = make_plan(12, 3, ToomMode::Double);
  auto sched = schedule_linear_combinations(plan);
  std::vector<LinExpr> init;
  for (std::size_t i = 0; i < plan.k; ++i) init.push_back(LinExpr::symbol(plan.k, i));
  // executing all steps at once equals executing one at a time
  auto all = symbolic_execute_schedule(sched, init);
  auto state = init;
  for (const auto& s : sched.steps) {
    AdderSchedule one;
    one.k = sched.k;
    one.steps = {s};
    state = symbolic_execute_schedule(one, state);
  }
  for (std::size_t i = 0; i < plan.k; ++i) CHECK(all[i] == state[i]);
}
